#pragma once

#include <functional>
#include <vector>

namespace hartree {

/// Cumulative integral I_k = int_{x_0}^{x_k} g dx on a uniform grid of
/// spacing h, third-degree Newton-Cotes per interval (fourth order for
/// smooth integrands).  Input holds g at x_0..x_{P-1}, P >= 4.
std::vector<double> cumulative_integral(const std::vector<double>& g, double h);

/// Cubic Lagrange interpolation of uniformly spaced samples.
///
/// Samples sit at x_k = x0 + k * h.  Queries outside [x0, x_last] return 0;
/// near the edges the stencil is clamped into range.
class CubicInterpolant {
 public:
  CubicInterpolant(double x0, double h, std::vector<double> samples);
  double operator()(double x) const;

 private:
  double x0_;
  double h_;
  std::vector<double> samples_;
};

/// Inverse of a continuous strictly increasing function by bracketed
/// bisection: returns s >= lo with f(s) = y.  The upper bracket starts at
/// `hi_seed` and doubles until it encloses y.
double monotone_increasing_inverse(const std::function<double(double)>& f,
                                   double y, double lo, double hi_seed);

}  // namespace hartree
