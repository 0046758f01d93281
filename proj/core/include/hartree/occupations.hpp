#pragma once

#include <vector>

#include "hartree/entropy.hpp"
#include "hartree/spectral.hpp"

namespace hartree {

/// Occupation of one bound level.  lambda is the weight of a single magnetic
/// substate, so the level carries mass degeneracy * lambda.
struct LevelOccupation {
  int l = 0;
  int n = 0;
  double eigenvalue = 0.0;
  int degeneracy = 1;
  double lambda = 0.0;
};

/// Occupations of a fixed spectrum at temperature T and chemical potential mu:
///   lambda_j = (beta')^{-1}((mu - mu_j) / T)_+.
/// Levels are aligned with the Spectrum entries they were built from.
struct OccupationSet {
  std::vector<LevelOccupation> levels;
  double mu = 0.0;
  double temperature = 0.0;
  double mass_realized = 0.0;  // sum degeneracy * lambda
};

/// Total mass carried at chemical potential mu.  Nondecreasing and continuous
/// in mu, zero once mu is at or below the lowest eigenvalue.
double mass_at_mu(const Spectrum& spectrum, double mu, double temperature,
                  const EntropySpec& spec);

/// Occupations at a prescribed chemical potential, no mass constraint.
OccupationSet occupations_at_mu(const Spectrum& spectrum, double mu,
                                double temperature, const EntropySpec& spec);

/// Finds mu < 0 with mass_realized = mass to |error| <= 1e-10 * mass by
/// bisection on (min eigenvalue - 1, -1e-14).  The occupation map is monotone
/// in mu but only piecewise smooth across level crossings, so bisection is
/// used for unconditional robustness.  When a level sits exactly at its
/// occupation threshold the map can be non-Lipschitz there (entropy exponents
/// above 2), the stated tolerance may be unreachable in double precision, and
/// the best representable mu is returned instead; the residual mass error is
/// then the map's own jump across one ulp.
///
/// Throws EmptySpectrum when there are no levels, and MassNotAttainable when
/// the bound spectrum cannot carry the requested mass even as mu -> 0^-
/// (truncated spectrum, or the evaporation regime near the maximal
/// temperature).
OccupationSet solve_chemical_potential(const Spectrum& spectrum, double mass,
                                       double temperature,
                                       const EntropySpec& spec);

/// Number of occupied substates: sum of degeneracies over levels with
/// lambda > threshold.  Callers conventionally use threshold = 1e-10 * mass.
int rank_of(const OccupationSet& occ, double threshold);

}  // namespace hartree
