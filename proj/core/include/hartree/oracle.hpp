#pragma once

#include <string>
#include <vector>

#include "hartree/entropy.hpp"
#include "hartree/grid.hpp"

namespace hartree::oracle {

/// Slow, simple reference computations kept deliberately independent of the
/// main solver: the potential here is a direct O(n^2) convolution and the
/// energy is assembled from scratch, so agreement with the SCF pipeline is a
/// genuine cross-check rather than a tautology.

struct Rank1Result {
  RadialField u;       // reduced wavefunction, h * sum u^2 = 1
  double energy = 0.0; // e_kin - e_pot at the final iterate
  double e_kin = 0.0;
  double e_pot = 0.0;
  int iterations = 0;  // accepted steps
  bool converged = false;
};

/// Per-unit-mass radial potential W(r) = h * sum_j u_j^2 / max(r, r_j) by the
/// direct double sum; the physical potential is mass * W.
std::vector<double> direct_potential_w(const std::vector<double>& u,
                                       const RadialGrid& grid);

/// Rank-1 Hartree energy of a state of the given mass carried by u:
///   mass * sum (u_{i+1}-u_i)^2 / h  -  mass^2/2 * h * sum u_k^2 W_k.
double rank1_energy(const std::vector<double>& u, const RadialGrid& grid,
                    double mass);

/// Coefficient-space gradient of rank1_energy, used by the finite-difference
/// check; the descent itself preconditions this direction implicitly.
std::vector<double> rank1_gradient(const std::vector<double>& u,
                                   const RadialGrid& grid, double mass);

/// Projected descent (imaginary-time style) on the rank-1 energy with mass
/// renormalization after every step.  Steps are semi-implicit in the stiff
/// Laplacian part and accepted only when the energy does not increase; the
/// step size halves on rejection and regrows on acceptance.
///
/// Throws Stagnation when the step collapses before any meaningful descent.
Rank1Result rank1_descent(double mass, const RadialGrid& grid,
                          double step = 8.0, int iterations = 800);

/// Ground-truth anchors for mass 1: the zero-temperature minimum and the two
/// lowest eigenvalues of the mean-field Hamiltonian at the minimizer.
struct ReferenceValues {
  double i_10 = 0.0;
  double mu0_0 = 0.0;
  double mu0_1 = 0.0;
  double r_max = 0.0;
  int n_points = 0;
};

/// Runs rank1_descent at mass 1 on the grid, then extracts the two lowest
/// bound eigenvalues of the oracle potential.  Checks mu0_0 = 3 * i_10
/// within 1e-3 relative, which the virial and multiplier identities force.
ReferenceValues reference_values(const RadialGrid& grid);

/// Plain text fixture, one `key = value` per line,
/// keys {i_10, mu0_0, mu0_1, r_max, n_points}.
void write_reference(const ReferenceValues& values, const std::string& path);
ReferenceValues read_reference(const std::string& path);

/// Frozen one-particle level for occupation subproblems.
struct FrozenLevel {
  double eigenvalue = 0.0;
  int degeneracy = 1;
};

/// Free energy of prescribed occupations on a frozen spectrum:
///   sum_j deg_j (lambda_j mu_j + T beta(lambda_j)).
double frozen_free_energy(const std::vector<FrozenLevel>& levels,
                          const std::vector<double>& lambda,
                          double temperature, const EntropySpec& spec);

struct GridSearchResult {
  double free_energy = 0.0;
  std::vector<double> lambda;
};

/// Dense grid search for the minimal frozen free energy over up to three
/// levels, with the mass constraint eliminated into the last level.  The scan
/// zooms three times around the incumbent, so the returned value sits within
/// roughly (mass/resolution/16)^2 curvature error of the true minimum.
GridSearchResult brute_force_free_energy(const std::vector<FrozenLevel>& levels,
                                         double mass, double temperature,
                                         const EntropySpec& spec,
                                         int resolution = 240);

}  // namespace hartree::oracle
