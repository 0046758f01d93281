#pragma once

#include <vector>

#include "hartree/grid.hpp"
#include "hartree/poisson.hpp"

namespace hartree {

/// Discrete radial Hamiltonian of one angular momentum channel acting on
/// reduced wavefunctions u(r) with Dirichlet endpoints:
///   (T_l u)_i = (2 u_i - u_{i-1} - u_{i+1}) / h^2
///               + [ l(l+1)/r_i^2 - V(r_i) ] u_i.
struct ChannelOperator {
  int l = 0;
  RadialGrid grid;
  std::vector<double> diag;
  double off = 0.0;  // constant subdiagonal -1/h^2
};

/// One bound level: reduced wavefunction normalized to int u^2 dr = 1 with
/// the trapezoid rule (h * sum u_i^2 = 1, exact for Dirichlet data).
struct EigenPair {
  double eigenvalue = 0.0;
  std::vector<double> u;
};

/// Spectrum entry with angular bookkeeping; degeneracy = 2l + 1.
struct SpectrumEntry {
  int l = 0;
  int n = 0;  // radial ordering within the channel, 0-based
  double eigenvalue = 0.0;
  int degeneracy = 1;
  std::vector<double> u;
};

/// Bound spectrum of -Delta - V, sorted ascending by eigenvalue.
struct Spectrum {
  RadialGrid grid;
  std::vector<SpectrumEntry> entries;
};

ChannelOperator make_channel_operator(const Potential& potential, int l);

/// Lowest k eigenpairs of one channel (any sign), ascending.  Eigenvectors
/// come from Sturm bisection plus inverse iteration; residuals are checked
/// against 1e-8 and near-degenerate pairs are reorthogonalized.
std::vector<EigenPair> channel_eigensolve(const Potential& potential, int l,
                                          int k);

/// All bound levels with eigenvalue < -bound_cutoff across channels
/// l = 0..l_max.  A channel with no bound level ends the sweep: the channel
/// operators increase monotonically with l.
Spectrum full_spectrum(const Potential& potential, int l_max, int k_per_channel,
                       double bound_cutoff = 1e-12);

/// Kinetic energy of one normalized level,
///   int (u')^2 dr + l(l+1) int u^2/r^2 dr,
/// in the discrete quadratic form of the channel operator, so that
/// eigenvalue = kinetic - int V u^2 dr holds to rounding.
double kinetic_energy_of_entry(const SpectrumEntry& entry, const RadialGrid& grid);

/// Same discrete form for a raw coefficient vector.
double kinetic_energy_of_u(const std::vector<double>& u, int l,
                           const RadialGrid& grid);

}  // namespace hartree
