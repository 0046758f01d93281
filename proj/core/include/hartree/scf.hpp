#pragma once

#include <optional>
#include <vector>

#include "hartree/entropy.hpp"
#include "hartree/occupations.hpp"
#include "hartree/poisson.hpp"
#include "hartree/spectral.hpp"

namespace hartree {

/// A mixed state given by its spectral data: the bound levels of the
/// mean-field Hamiltonian -Delta - V, their occupations, and the density
/// and potential they generate.
///
/// At a fixed point the pieces cohere node-wise:
///   density(r_i) = sum_j lambda_j (2 l_j + 1) u_j(r_i)^2 / (4 pi r_i^2),
/// integrate_volume(density) = mass, and potential is the Newtonian
/// potential of density.  Mid-iteration states carry the mixed density
/// instead; the two coincide at convergence.
///
/// entropy is engaged iff temperature > 0; zero-temperature states carry
/// no entropy model.
struct MixedState {
  Spectrum spectrum;
  OccupationSet occupations;  // aligned index-wise with spectrum.entries
  RadialField density;
  Potential potential;
  double mu = 0.0;
  double temperature = 0.0;
  double mass = 0.0;  // constraint value, not the quadrature of density
  std::optional<EntropySpec> entropy;
};

/// Free-energy bookkeeping of one state.
///
/// entropy_term is tr beta(rho) = sum (2l+1) beta(lambda); the physical
/// entropy is its negative, so
///   total = e_kin - e_pot + temperature * entropy_term.
/// virial_ratio is tr(V rho) / tr(-Delta rho) = 2 e_pot / e_kin, which
/// equals 4 at any minimizer (0 is reported for empty states).
/// multiplier_residual is |mu M - sum (2l+1) lambda (mu_j + T beta'(lambda))|,
/// zero in exact arithmetic when the occupations solve the constrained
/// problem at chemical potential mu.
struct FreeEnergyBreakdown {
  double e_kin = 0.0;
  double e_pot = 0.0;
  double entropy_term = 0.0;
  double total = 0.0;
  double virial_ratio = 0.0;
  double multiplier_residual = 0.0;
};

/// Iteration controls.  Convergence thresholds are relative: the L1 density
/// residual must fall below tol_density * mass and the free-energy step
/// below tol_energy * |F| + 1e-12.  The mixing weight is adapted downward
/// (halved after two consecutive free-energy increases, floored at 0.05)
/// starting from `mixing`.
struct SCFConfig {
  double mixing = 0.8;  // initial linear-mixing weight, in (0, 1]
  int max_iterations = 500;
  double tol_density = 1e-8;  // per unit mass
  double tol_energy = 1e-10;  // per unit |F|
  int l_max = 4;
  int k_per_channel = 4;
  double r_max = 100.0;
  int n_points = 5000;
  std::optional<RadialField> seed_density;  // warm start, on the config grid
};

/// Outcome of a solve.  A run that exhausts max_iterations is returned with
/// converged = false rather than thrown: temperature scans need the partial
/// state to decide how to proceed.
struct SolveResult {
  MixedState state;
  FreeEnergyBreakdown breakdown;
  int iterations = 0;
  bool converged = false;
  int rank = 0;                  // occupied substates, threshold 1e-10 * mass
  double tail_mass_half = 0.0;   // mass beyond r_max / 2
  double truncation_leak = 0.0;  // fraction of mass beyond 0.9 r_max
  std::vector<double> f_history;  // free energy after each sweep
};

/// Number density of an occupied spectrum,
///   n(r_i) = sum_j lambda_j (2 l_j + 1) u_j(r_i)^2 / (4 pi r_i^2).
/// Zero-weight levels are skipped; empty occupations give the zero field.
/// Throws InvalidParameter when the occupations are not aligned with the
/// spectrum entries.
RadialField density_from_state(const Spectrum& spectrum,
                               const OccupationSet& occupations);

/// Evaluates the breakdown on the state as stored: kinetic and entropy
/// parts from the occupied orbitals, e_pot = (1/2) int n V dx from the
/// stored density/potential pair.
FreeEnergyBreakdown free_energy(const MixedState& state);

/// One fixed-point sweep at T > 0: diagonalize the stored potential, occupy
/// its bound levels at the mass-constrained chemical potential, then mix
///   n_next = (1 - mixing) n_prev + mixing n_fresh
/// and renormalize to the target mass.  The returned spectrum and
/// occupations are the fresh ones; the returned density and potential are
/// the mixed ones.  The degenerate weight mixing = 0 is permitted here (the
/// output density equals the input) even though an iteration needs a
/// positive weight to move.
MixedState scf_step(const MixedState& state, const SCFConfig& config);

/// Full thermal solve: iterate scf_step from the seed density until both
/// tolerances hold, with adaptive mixing.  The reported state is the pure
/// output of the last sweep (orbitals, occupations and the density they
/// generate), not the mixed iterate.
///
/// After the fixed point is reached, a mass-preserving dilation trial at
/// scale s = e_pot / (2 e_kin) certifies it: at a minimizer the virial
/// identity makes s = 1 stationary, so a material drop in F means the
/// iteration stalled short and the solve restarts from the dilated density
/// (at most 3 restarts, within the shared iteration budget).
///
/// Throws InvalidTemperature for T <= 0 (use zero_temperature_solve),
/// InvalidParameter for a bad mass or config, and propagates
/// MassNotAttainable from the occupation solve when the truncated bound
/// spectrum cannot carry the mass, which is the signature of the
/// evaporation regime near the maximal temperature.
SolveResult scf_solve(double mass, double temperature, const EntropySpec& spec,
                      const SCFConfig& config);

/// Ground solve at T = 0: rank-1 SCF on the lowest l = 0 level carrying the
/// whole mass.  The final spectrum is re-expanded over all channels up to
/// l_max so the two lowest mean-field eigenvalues are exposed for critical
/// temperature work.  The same dilation certificate as in scf_solve runs
/// after convergence.  E_pot = 2 E_kin holds at the minimizer up to
/// discretization.
SolveResult zero_temperature_solve(double mass, const SCFConfig& config);

/// Mass beyond `radius`: 4 pi int_R^{r_max} r^2 n dr by the trapezoid rule
/// with R snapped up to the next grid node.  Returns 0 for radius >= r_max;
/// throws InvalidParameter for radius < 0.
double tail_mass(const MixedState& state, double radius);

/// Local minimality probe along occupation mixtures.  Draws `trials`
/// randomized occupation vectors sigma of total mass `state.mass` on the
/// state's own levels and returns the smallest value of
///   F((1 - t) rho + t sigma) - F(rho)  over  t in {1e-3, 1e-2}.
/// Nonnegative up to solver tolerance when rho is a local minimizer.
/// Deterministic for a fixed rng_seed.
double minimality_probe(const MixedState& state, int trials = 5,
                        unsigned rng_seed = 12345);

}  // namespace hartree
