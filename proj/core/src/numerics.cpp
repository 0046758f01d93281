#include "hartree/numerics.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "hartree/errors.hpp"

namespace hartree {

std::vector<double> cumulative_integral(const std::vector<double>& g, double h) {
  const size_t p = g.size();
  if (p < 4) {
    throw InvalidParameter("cumulative_integral: needs at least 4 samples");
  }
  std::vector<double> out(p, 0.0);

  // Integral over one interval from the cubic through four neighbouring
  // samples.  Interior intervals use the centered stencil, the first and
  // last use one-sided stencils of the same degree.
  auto first = [&](size_t i) {
    return h * (9.0 * g[i] + 19.0 * g[i + 1] - 5.0 * g[i + 2] + g[i + 3]) / 24.0;
  };
  auto centered = [&](size_t i) {
    return h * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]) / 24.0;
  };
  auto last = [&](size_t i) {
    return h * (g[i - 2] - 5.0 * g[i - 1] + 19.0 * g[i] + 9.0 * g[i + 1]) / 24.0;
  };

  double acc = 0.0;
  for (size_t i = 0; i + 1 < p; ++i) {
    if (i == 0) {
      acc += first(i);
    } else if (i + 2 >= p) {
      acc += last(i);
    } else {
      acc += centered(i);
    }
    out[i + 1] = acc;
  }
  return out;
}

CubicInterpolant::CubicInterpolant(double x0, double h, std::vector<double> samples)
    : x0_(x0), h_(h), samples_(std::move(samples)) {
  if (samples_.size() < 4) {
    throw InvalidParameter("CubicInterpolant: needs at least 4 samples");
  }
  if (!(h > 0.0)) {
    throw InvalidParameter("CubicInterpolant: spacing must be positive");
  }
}

double CubicInterpolant::operator()(double x) const {
  const auto n = static_cast<long>(samples_.size());
  const double t = (x - x0_) / h_;
  if (t < 0.0 || t > static_cast<double>(n - 1)) return 0.0;

  long i = static_cast<long>(std::floor(t)) - 1;
  if (i < 0) i = 0;
  if (i > n - 4) i = n - 4;

  double result = 0.0;
  for (long j = 0; j < 4; ++j) {
    double basis = 1.0;
    for (long k = 0; k < 4; ++k) {
      if (k == j) continue;
      basis *= (t - static_cast<double>(i + k)) /
               static_cast<double>(j - k);
    }
    result += basis * samples_[static_cast<size_t>(i + j)];
  }
  return result;
}

double monotone_increasing_inverse(const std::function<double(double)>& f,
                                   double y, double lo, double hi_seed) {
  if (f(lo) > y) {
    throw InvalidParameter("monotone_increasing_inverse: y below f(lo)");
  }
  double hi = hi_seed;
  int growth = 0;
  while (f(hi) < y) {
    hi *= 2.0;
    if (++growth > 200) {
      throw ConvergenceFailure("monotone_increasing_inverse: no upper bracket");
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace hartree
