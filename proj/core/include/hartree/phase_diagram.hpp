#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hartree/entropy.hpp"
#include "hartree/scf.hpp"

namespace hartree {

/// Temperature sweeps and structural checks on top of the SCF solver:
/// locating the critical temperature T_c (loss of purity) and the maximal
/// temperature T* (loss of binding), and validating the scaling,
/// sub-additivity, concavity and monotonicity relations of (M, T) -> i_{M,T}.

struct ScanPoint {
  double temperature = 0.0;
  double free_energy = 0.0;  // i_{M,T} estimate from the converged solve
  double e_kin = 0.0;
  double e_pot = 0.0;
  double entropy_term = 0.0;
  double mu = 0.0;
  int rank = 0;
  double lambda2 = 0.0;  // occupation of the second occupied level, 0 if pure
  int iterations = 0;
  bool converged = false;
  std::string note;  // failure classification or flag, empty when clean
};

struct ScanResult {
  std::vector<ScanPoint> points;
  // Summary slots; filled by the drivers that compute them, nullopt otherwise.
  std::optional<double> t_c_scan;
  std::optional<double> t_c_formula;
  std::optional<double> t_star;
  int concavity_violations = 0;  // upward second differences on uniform grids
};

enum class ScanMode {
  warm_started,  // sequential, each point seeded with the previous density
  independent,   // cold starts; points may be solved concurrently
};

/// One solve per temperature. Failures are recorded per point (converged =
/// false plus a note) and the scan continues; a failed point never feeds the
/// warm-start chain. Points with free energy >= 0 are flagged in the note:
/// past the maximal temperature the infimum is zero and the reported branch
/// value is only a critical point. Temperatures must be positive and strictly
/// increasing; an empty list yields an empty result.
///
/// threads > 1 is honored only in independent mode.
ScanResult temperature_scan(double mass, const EntropySpec& spec,
                            const std::vector<double>& temperatures,
                            const SCFConfig& config,
                            ScanMode mode = ScanMode::warm_started,
                            int threads = 1);

/// T_c(M) = (mu^0_1 - mu^0_0) / beta'(M) from the two lowest eigenvalues of
/// the converged zero-temperature solve. Throws InsufficientSpectrum when
/// fewer than two bound levels are available, InvalidParameter when the
/// input did not converge.
double critical_temperature_formula(double mass, const EntropySpec& spec,
                                    const SolveResult& zero_t);

struct CriticalTemperatureResult {
  double t_c_scan = 0.0;     // bisection on the rank-1 -> rank-2 transition
  double t_c_formula = 0.0;  // eigenvalue-gap formula at T = 0
  double relative_gap = 0.0;
  std::vector<ScanPoint> trace;  // every probe in the order it was solved
};

/// Locates the loss of purity two independent ways: the spectral-gap formula
/// and a bisection on the first temperature whose minimizer has rank > 1
/// (occupation threshold 1e-10 * M). The bracket comes from a coarse upward
/// scan in units of the formula value and is halved 12 times, giving a
/// relative width well under 1e-3. Probes are warm-started.
CriticalTemperatureResult find_critical_temperature(double mass,
                                                    const EntropySpec& spec,
                                                    const SCFConfig& config);

struct TStarResult {
  std::optional<double> t_star;  // engaged only when the sign change was found
  double t_c_formula = 0.0;
  double ceiling = 0.0;      // largest temperature the search may probe
  double lower_bound = 0.0;  // max_m m^3 |i_{1,0}| / beta(m), m in (0, M]
  std::vector<ScanPoint> trace;
  std::string note;  // why the search stopped when no root was found

  bool found() const { return t_star.has_value(); }
};

/// Follows T -> i_{M,T} upward (geometric march, warm-started) until the
/// free energy crosses zero, then refines the root by secant from the
/// negative side; concavity makes that iteration monotone. When the branch
/// stays negative up to ceiling_factor * T_c, or the truncated basis stops
/// carrying the mass before any sign change, no root is reported: for
/// entropies with beta(s)/s^3 -> 0 the maximal temperature is genuinely
/// infinite, and a failure is not evidence of a root.
TStarResult find_max_temperature(double mass, const EntropySpec& spec,
                                 const SCFConfig& config,
                                 double ceiling_factor = 1e3);

/// max over a log grid of m in (0, M] of m^3 |i_10| / beta(m); i_10 is the
/// unit-mass ground energy and must be negative. The grid contains m = M
/// exactly, so monotone maximands (power laws with p < 3) are evaluated
/// without grid error. For p > 3 the maximand diverges as m -> 0 and the
/// returned value is only the grid-floor sample of an infinite supremum.
double tstar_lower_bound(double mass, const EntropySpec& spec, double i_10);

struct ScalingReport {
  double lhs = 0.0;  // i at (lambda M, lambda^{3-p} T), mass-scaled domain
  double rhs = 0.0;  // lambda^3 * i at (M, T)
  double margin = 0.0;                 // rhs - lhs, >= -tolerance when ok
  double transform_value = 0.0;        // F of the transformed state
  double transform_expected = 0.0;     // lambda^3 * F of the base state
  double transform_relative_error = 0.0;
  bool inequality_ok = false;
  bool transform_ok = false;
};

/// Checks i(lambda M, lambda^{3-p} T) <= lambda^3 i(M, T) with independent
/// solves (the scaled solve runs on r_max / lambda, preserving resolution
/// per length scale), and separately applies the exact dilation
///   u_j -> sqrt(lambda) u_j(lambda r), lambda_j -> lambda lambda_j
/// to the converged base state, re-evaluating the functional on the scaled
/// grid. The resampled nodes coincide with source nodes, so the identity
/// F_{T'}[rho_lambda] = lambda^3 F_T[rho] is reproduced to rounding; the
/// report records the measured relative error. Power-law entropy only: the
/// entropy term scales this way only when beta is homogeneous.
ScalingReport scaling_check(double mass, double temperature, double lambda,
                            double p, const SCFConfig& config);

struct SubadditivityReport {
  double i_whole = 0.0;  // i_{M,T}
  double i_left = 0.0;   // i_{M-m,T}
  double i_right = 0.0;  // i_{m,T}
  double gap = 0.0;      // i_left + i_right - i_whole, strictly positive
  bool ok = false;
};

/// Checks i_{M,T} <= i_{M-m,T} + i_{m,T} for 0 < m < M. Each mass is solved
/// on its own domain, r_max scaled by M / mass, because smaller masses bind
/// more weakly and spread: points per natural length are then constant.
/// The caller keeps T below the thresholds of both submasses.
SubadditivityReport subadditivity_check(double mass, double m,
                                        double temperature,
                                        const EntropySpec& spec,
                                        const SCFConfig& config);

}  // namespace hartree
