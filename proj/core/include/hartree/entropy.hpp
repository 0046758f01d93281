#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hartree {

/// Result of checking the structural assumptions on an entropy generator.
struct ValidationReport {
  bool convex = false;           // strictly convex on the sampled range
  bool nonnegative = false;      // beta >= 0 on [0,1], beta(0) = beta'(0) = 0
  bool exponent_bound = false;   // sup m beta'(m)/beta(m) <= 3
  double p_sup = 0.0;            // sampled supremum, NaN when undefined
  std::vector<std::string> messages;

  bool all() const { return convex && nonnegative && exponent_bound; }
};

/// Entropy generator beta for the Casimir functional -tr beta(rho).
///
/// Either a power law s^p with p > 1, or a custom triple of handles
/// (beta, beta', inverse of beta').  The inverse is always evaluated in its
/// clamped form: arguments <= 0 map to occupation 0.
class EntropySpec {
 public:
  /// beta(s) = s^p, p > 1.  Throws InvalidParameter for p <= 1.
  static EntropySpec power_law(double p);

  /// Fully custom generator.  The inverse handle only sees y > 0.
  static EntropySpec custom(std::function<double(double)> beta,
                            std::function<double(double)> beta_prime,
                            std::function<double(double)> beta_prime_inverse,
                            std::string label = "custom");

  /// Convenience: beta(s) = sum_k c_k s^{p_k} with c_k > 0, p_k > 1.
  /// The inverse of beta' is computed by monotone bisection.
  static EntropySpec power_sum(std::vector<std::pair<double, double>> terms,
                               std::string label = "custom");

  /// Throws NegativeArgument for s < 0.
  double beta(double s) const;
  double beta_prime(double s) const;

  /// Clamped inverse (beta')^{-1}(y)_+, zero for y <= 0.
  double beta_prime_inverse(double y) const;

  bool is_power_law() const { return power_ > 1.0; }
  /// Power-law exponent; throws InvalidParameter for custom specs.
  double exponent() const;

  const std::string& label() const { return label_; }

 private:
  EntropySpec() = default;

  double power_ = 0.0;  // > 1 for power laws, 0 for custom
  std::function<double(double)> beta_;
  std::function<double(double)> beta_prime_;
  std::function<double(double)> beta_prime_inverse_;
  std::string label_;
};

/// Sampled supremum of m beta'(m) / beta(m) over (0, mass].
///
/// Exact for power laws.  For custom specs the ratio is evaluated on a
/// log-spaced grid; throws UndefinedAtZero if beta is not positive at a
/// sampled point.
double p_sup(const EntropySpec& spec, double mass);

/// Checks strict convexity, nonnegativity on [0,1] with beta(0)=beta'(0)=0,
/// and the exponent bound p_sup <= 3 on [0, s_max].
ValidationReport validate_assumptions(const EntropySpec& spec, double s_max);

}  // namespace hartree
