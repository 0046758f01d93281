#include "hartree/occupations.hpp"

#include <cmath>

#include "hartree/errors.hpp"

namespace hartree {

namespace {

void check_positive_temperature(double temperature) {
  if (!(temperature > 0.0)) {
    throw InvalidTemperature("occupations require T > 0");
  }
}

}  // namespace

double mass_at_mu(const Spectrum& spectrum, double mu, double temperature,
                  const EntropySpec& spec) {
  check_positive_temperature(temperature);
  double total = 0.0;
  for (const SpectrumEntry& entry : spectrum.entries) {
    const double y = (mu - entry.eigenvalue) / temperature;
    total += entry.degeneracy * spec.beta_prime_inverse(y);
  }
  return total;
}

OccupationSet occupations_at_mu(const Spectrum& spectrum, double mu,
                                double temperature, const EntropySpec& spec) {
  check_positive_temperature(temperature);
  OccupationSet occ;
  occ.mu = mu;
  occ.temperature = temperature;
  occ.levels.reserve(spectrum.entries.size());
  for (const SpectrumEntry& entry : spectrum.entries) {
    const double y = (mu - entry.eigenvalue) / temperature;
    const double lambda = spec.beta_prime_inverse(y);
    occ.levels.push_back(
        {entry.l, entry.n, entry.eigenvalue, entry.degeneracy, lambda});
    occ.mass_realized += entry.degeneracy * lambda;
  }
  return occ;
}

OccupationSet solve_chemical_potential(const Spectrum& spectrum, double mass,
                                       double temperature,
                                       const EntropySpec& spec) {
  if (spectrum.entries.empty()) {
    throw EmptySpectrum("no bound levels to occupy");
  }
  check_positive_temperature(temperature);
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");

  const double tol = 1e-10 * mass;
  const double hi_cap = -1e-14;  // the multiplier stays strictly negative
  const double at_cap = mass_at_mu(spectrum, hi_cap, temperature, spec);
  if (at_cap < mass - tol) {
    throw MassNotAttainable(
        "bound spectrum cannot carry the requested mass at mu -> 0^-");
  }
  if (at_cap <= mass + tol) {
    return occupations_at_mu(spectrum, hi_cap, temperature, spec);
  }

  double lo = spectrum.entries.front().eigenvalue - 1.0;  // carries zero mass
  double hi = hi_cap;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      // The bracket has collapsed to adjacent doubles without meeting the
      // mass tolerance. That happens when a level sits at its occupation
      // threshold and the inverse of beta' has unbounded slope there (any
      // exponent above 2), so the carried mass jumps by more than tol
      // across one ulp of mu. No representable mu does better; take the
      // endpoint whose mass error is smaller.
      const double err_lo =
          std::abs(mass_at_mu(spectrum, lo, temperature, spec) - mass);
      const double err_hi =
          std::abs(mass_at_mu(spectrum, hi, temperature, spec) - mass);
      return occupations_at_mu(spectrum, err_lo <= err_hi ? lo : hi,
                               temperature, spec);
    }
    const double carried = mass_at_mu(spectrum, mid, temperature, spec);
    if (std::abs(carried - mass) <= tol) {
      return occupations_at_mu(spectrum, mid, temperature, spec);
    }
    if (carried < mass) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceFailure("chemical potential bisection stalled");
}

int rank_of(const OccupationSet& occ, double threshold) {
  if (!(threshold > 0.0)) throw InvalidParameter("rank threshold must be > 0");
  int rank = 0;
  for (const LevelOccupation& level : occ.levels) {
    if (level.lambda > threshold) rank += level.degeneracy;
  }
  return rank;
}

}  // namespace hartree
