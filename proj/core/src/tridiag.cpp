#include "hartree/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hartree/errors.hpp"

namespace hartree::tridiag {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivot_floor(const std::vector<double>& e) {
  double emax2 = 1.0;
  for (double v : e) emax2 = std::max(emax2, v * v);
  return std::numeric_limits<double>::min() * emax2;
}

// Gershgorin interval enclosing the whole spectrum.
std::pair<double, double> gershgorin(const std::vector<double>& d,
                                     const std::vector<double>& e) {
  const size_t n = d.size();
  double lo = d[0], hi = d[0];
  for (size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(e[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(e[i]) : 0.0;
    lo = std::min(lo, d[i] - left - right);
    hi = std::max(hi, d[i] + left + right);
  }
  const double pad = kEps * (std::abs(lo) + std::abs(hi)) +
                     2.0 * std::numeric_limits<double>::min();
  return {lo - pad, hi + pad};
}

}  // namespace

int count_below(const std::vector<double>& d, const std::vector<double>& e,
                double x) {
  const size_t n = d.size();
  const double pivmin = pivot_floor(e);
  int count = 0;
  double q = 1.0;
  for (size_t i = 0; i < n; ++i) {
    const double carry = (i > 0) ? e[i - 1] * e[i - 1] / q : 0.0;
    q = d[i] - x - carry;
    // Exact zero pivots count as negative, matching the classic convention.
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> lowest_eigenvalues(const std::vector<double>& d,
                                       const std::vector<double>& e, int k) {
  const int n = static_cast<int>(d.size());
  if (n == 0 || e.size() + 1 != d.size()) {
    throw InvalidParameter("lowest_eigenvalues: inconsistent matrix arrays");
  }
  if (k < 1 || k > n) {
    throw InvalidParameter("lowest_eigenvalues: k out of range, k = " +
                           std::to_string(k) + ", n = " + std::to_string(n));
  }

  const auto [gl, gu] = gershgorin(d, e);
  std::vector<double> lambda(static_cast<size_t>(k));

  double lo_floor = gl;
  for (int j = 1; j <= k; ++j) {
    double lo = lo_floor;
    double hi = gu;
    // Eigenvalues are ordered, so the previous one is a valid lower bound.
    for (int it = 0; it < 128; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (count_below(d, e, mid) >= j) {
        hi = mid;
      } else {
        lo = mid;
      }
      if (hi - lo <= 2.0 * kEps * (std::abs(lo) + std::abs(hi))) break;
    }
    lambda[static_cast<size_t>(j - 1)] = 0.5 * (lo + hi);
    lo_floor = lo;
  }
  return lambda;
}

std::vector<double> eigenvector(const std::vector<double>& d,
                                const std::vector<double>& e, double lambda) {
  const size_t n = d.size();
  if (n == 0 || e.size() + 1 != n) {
    throw InvalidParameter("eigenvector: inconsistent matrix arrays");
  }

  // LU factorization of (A - lambda I) with partial pivoting.  Pivoting can
  // fill a second superdiagonal; multipliers and swap flags are kept so the
  // forward elimination can be replayed on later right-hand sides.
  std::vector<double> u(n), v(n, 0.0), w(n, 0.0), mult(n, 0.0);
  std::vector<char> swapped(n, 0);

  u[0] = d[0] - lambda;
  if (n > 1) v[0] = e[0];
  for (size_t i = 0; i + 1 < n; ++i) {
    double below = e[i];
    double dn = d[i + 1] - lambda;
    double vn = (i + 2 < n) ? e[i + 1] : 0.0;
    if (std::abs(below) > std::abs(u[i])) {
      swapped[i] = 1;
      std::swap(u[i], below);
      const double tv = v[i];
      v[i] = dn;
      dn = tv;
      w[i] = vn;
      vn = 0.0;
    }
    if (u[i] == 0.0) u[i] = kEps * std::abs(lambda) + std::numeric_limits<double>::min();
    const double m = below / u[i];
    mult[i] = m;
    u[i + 1] = dn - m * v[i];
    if (i + 2 < n) v[i + 1] = vn - m * w[i];
  }

  auto backsolve = [&](std::vector<double>& x) {
    for (size_t ii = n; ii-- > 0;) {
      double acc = x[ii];
      if (ii + 1 < n) acc -= v[ii] * x[ii + 1];
      if (ii + 2 < n) acc -= w[ii] * x[ii + 2];
      double piv = u[ii];
      if (piv == 0.0) piv = kEps;
      x[ii] = acc / piv;
    }
  };
  auto forward = [&](std::vector<double>& x) {
    for (size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= mult[i] * x[i];
    }
  };
  auto normalize = [&](std::vector<double>& x) {
    double norm = 0.0;
    for (double value : x) norm += value * value;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      throw ConvergenceFailure("eigenvector: inverse iteration collapsed");
    }
    for (double& value : x) value /= norm;
    return norm;
  };

  // Start from a fixed full-spectrum right-hand side (a uniform start is
  // orthogonal to antisymmetric modes); two or three passes reach residuals
  // at the rounding floor for bisected eigenvalues.
  std::vector<double> x(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (size_t i = 0; i < n; ++i) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    x[i] = 0.5 + static_cast<double>(state % 1024) / 1024.0;
  }
  backsolve(x);
  normalize(x);
  for (int pass = 0; pass < 3; ++pass) {
    forward(x);
    backsolve(x);
    const double growth = normalize(x);
    if (growth > 0.1 / kEps) break;
  }
  return x;
}

double residual_norm(const std::vector<double>& d, const std::vector<double>& e,
                     double lambda, const std::vector<double>& v) {
  const size_t n = d.size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double row = (d[i] - lambda) * v[i];
    if (i > 0) row += e[i - 1] * v[i - 1];
    if (i + 1 < n) row += e[i] * v[i + 1];
    acc += row * row;
  }
  return std::sqrt(acc);
}

}  // namespace hartree::tridiag
