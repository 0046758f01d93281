#include "hartree/entropy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "hartree/errors.hpp"
#include "hartree/numerics.hpp"

namespace hartree {

namespace {

std::string format_power(double p) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "power:%.12g", p);
  return buf;
}

void require_nonnegative(double s, const char* who) {
  if (s < 0.0 || !std::isfinite(s)) {
    throw NegativeArgument(std::string(who) + ": occupation argument must be " +
                           "finite and nonnegative, got " + std::to_string(s));
  }
}

}  // namespace

EntropySpec EntropySpec::power_law(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidParameter("EntropySpec::power_law: exponent must exceed 1, got " +
                           std::to_string(p));
  }
  EntropySpec spec;
  spec.power_ = p;
  spec.label_ = format_power(p);
  return spec;
}

EntropySpec EntropySpec::custom(std::function<double(double)> beta,
                                std::function<double(double)> beta_prime,
                                std::function<double(double)> beta_prime_inverse,
                                std::string label) {
  if (!beta || !beta_prime || !beta_prime_inverse) {
    throw InvalidParameter("EntropySpec::custom: all three handles are required");
  }
  EntropySpec spec;
  spec.beta_ = std::move(beta);
  spec.beta_prime_ = std::move(beta_prime);
  spec.beta_prime_inverse_ = std::move(beta_prime_inverse);
  spec.label_ = std::move(label);
  return spec;
}

EntropySpec EntropySpec::power_sum(std::vector<std::pair<double, double>> terms,
                                   std::string label) {
  if (terms.empty()) {
    throw InvalidParameter("EntropySpec::power_sum: needs at least one term");
  }
  for (const auto& [c, p] : terms) {
    if (!(c > 0.0) || !(p > 1.0)) {
      throw InvalidParameter(
          "EntropySpec::power_sum: coefficients must be positive and "
          "exponents must exceed 1");
    }
  }
  auto beta = [terms](double s) {
    double acc = 0.0;
    for (const auto& [c, p] : terms) acc += c * std::pow(s, p);
    return acc;
  };
  auto beta_prime = [terms](double s) {
    double acc = 0.0;
    for (const auto& [c, p] : terms) acc += c * p * std::pow(s, p - 1.0);
    return acc;
  };
  auto inverse = [beta_prime](double y) {
    return monotone_increasing_inverse(beta_prime, y, 0.0, 1.0);
  };
  return custom(beta, beta_prime, inverse, std::move(label));
}

double EntropySpec::beta(double s) const {
  require_nonnegative(s, "beta");
  if (is_power_law()) return std::pow(s, power_);
  return beta_(s);
}

double EntropySpec::beta_prime(double s) const {
  require_nonnegative(s, "beta_prime");
  if (is_power_law()) return power_ * std::pow(s, power_ - 1.0);
  return beta_prime_(s);
}

double EntropySpec::beta_prime_inverse(double y) const {
  if (!(y > 0.0)) return 0.0;
  if (is_power_law()) return std::pow(y / power_, 1.0 / (power_ - 1.0));
  return beta_prime_inverse_(y);
}

double EntropySpec::exponent() const {
  if (!is_power_law()) {
    throw InvalidParameter("EntropySpec::exponent: spec is not a power law");
  }
  return power_;
}

double p_sup(const EntropySpec& spec, double mass) {
  if (!(mass > 0.0)) {
    throw InvalidParameter("p_sup: mass must be positive");
  }
  if (spec.is_power_law()) return spec.exponent();

  // Log-spaced sweep over ten decades below the mass; the ratio of a
  // power-sum style generator varies slowly in log m, so this resolves the
  // supremum well beyond the tolerances it is used with.
  constexpr int kSamples = 4096;
  constexpr double kDecades = 10.0;
  double sup = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kSamples; ++k) {
    const double frac = static_cast<double>(k) / (kSamples - 1);
    const double m = mass * std::pow(10.0, -kDecades * (1.0 - frac));
    const double b = spec.beta(m);
    if (!(b > 0.0)) {
      throw UndefinedAtZero("p_sup: beta is not positive at m = " +
                            std::to_string(m));
    }
    const double ratio = m * spec.beta_prime(m) / b;
    if (!std::isfinite(ratio)) {
      throw UndefinedAtZero("p_sup: ratio not finite at m = " + std::to_string(m));
    }
    if (ratio > sup) sup = ratio;
  }
  return sup;
}

ValidationReport validate_assumptions(const EntropySpec& spec, double s_max) {
  if (!(s_max > 0.0)) {
    throw InvalidParameter("validate_assumptions: s_max must be positive");
  }
  ValidationReport report;
  constexpr int kSamples = 2048;
  constexpr double kTol = 1e-9;

  // (1) strict convexity via second differences on [0, s_max].
  report.convex = true;
  const double ds = s_max / (kSamples + 1);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kSamples; ++k) {
    const double s = k * ds;
    const double second =
        spec.beta(s + ds) - 2.0 * spec.beta(s) + spec.beta(s - ds);
    if (!(second > -kTol * std::max(1.0, std::abs(spec.beta(s_max))))) {
      report.convex = false;
      report.messages.push_back("second difference not positive near s = " +
                                std::to_string(s));
      break;
    }
    worst = std::min(worst, second);
  }
  // Strictness spot check at a coarse scale where curvature is measurable.
  if (report.convex) {
    const double a = 0.25 * s_max, b = 0.75 * s_max;
    if (!(spec.beta(0.5 * (a + b)) < 0.5 * (spec.beta(a) + spec.beta(b)))) {
      report.convex = false;
      report.messages.push_back("midpoint inequality not strict on coarse scale");
    }
  }

  // (2) nonnegative on [0,1] with beta(0) = beta'(0) = 0.
  report.nonnegative = true;
  if (std::abs(spec.beta(0.0)) > kTol) {
    report.nonnegative = false;
    report.messages.push_back("beta(0) != 0");
  }
  const double slope0 = spec.beta_prime(0.0);
  if (!std::isfinite(slope0) || std::abs(slope0) > kTol) {
    report.nonnegative = false;
    report.messages.push_back("beta'(0) != 0");
  }
  for (int k = 0; k <= kSamples; ++k) {
    const double s = static_cast<double>(k) / kSamples;
    if (spec.beta(s) < -kTol) {
      report.nonnegative = false;
      report.messages.push_back("beta negative at s = " + std::to_string(s));
      break;
    }
  }

  // (3) growth exponent bound.
  try {
    report.p_sup = p_sup(spec, s_max);
    report.exponent_bound = report.p_sup <= 3.0 + 1e-12;
    if (!report.exponent_bound) {
      report.messages.push_back("p_sup = " + std::to_string(report.p_sup) +
                                " exceeds 3");
    }
  } catch (const Error& e) {
    report.p_sup = std::numeric_limits<double>::quiet_NaN();
    report.exponent_bound = false;
    report.messages.push_back(std::string("p_sup unavailable: ") + e.what());
  }

  return report;
}

}  // namespace hartree
