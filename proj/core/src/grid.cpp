#include "hartree/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hartree {

namespace {

// Integral of g over [0, r_max] where g is given on the extended point set
// x_0 = 0, x_1..x_N (interior nodes), x_{N+1} = r_max with g_0 = g_{N+1} = 0.
// The lambda `g` is evaluated once per interior node.
template <typename G>
double integrate_extended(const RadialGrid& grid, G&& g) {
  const int n = grid.n_points;
  const int intervals = n + 1;
  const double h = grid.h;

  // Simpson pairs cover an even number of intervals.  With an odd count the
  // final interval [r_N, r_max] is handled by the trapezoid rule; its left
  // value is the last node and its right value is zero by the Dirichlet
  // convention, so the fallback costs h * g_N / 2.
  const int simpson_intervals = (intervals % 2 == 0) ? intervals : intervals - 1;

  auto value = [&](int point) -> double {
    if (point == 0 || point == n + 1) return 0.0;
    return g(point - 1);
  };

  double sum = 0.0;
  for (int k = 0; k + 2 <= simpson_intervals; k += 2) {
    sum += value(k) + 4.0 * value(k + 1) + value(k + 2);
  }
  double integral = sum * h / 3.0;
  if (simpson_intervals != intervals) {
    integral += 0.5 * h * (value(n) + value(n + 1));
  }
  return integral;
}

}  // namespace

RadialGrid make_grid(double r_max, int n_points) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw InvalidGrid("make_grid: r_max must be positive and finite, got " +
                      std::to_string(r_max));
  }
  if (n_points < 16) {
    throw InvalidGrid("make_grid: n_points must be at least 16, got " +
                      std::to_string(n_points));
  }
  RadialGrid grid;
  grid.r_max = r_max;
  grid.n_points = n_points;
  grid.h = r_max / static_cast<double>(n_points + 1);
  return grid;
}

RadialField make_field(const RadialGrid& grid) {
  RadialField field;
  field.grid = grid;
  field.values.assign(static_cast<size_t>(grid.n_points), 0.0);
  return field;
}

void require_same_grid(const RadialField& f, const RadialField& g) {
  if (!(f.grid == g.grid)) {
    throw GridMismatch("fields live on different grids: (" +
                       std::to_string(f.grid.r_max) + ", " +
                       std::to_string(f.grid.n_points) + ") vs (" +
                       std::to_string(g.grid.r_max) + ", " +
                       std::to_string(g.grid.n_points) + ")");
  }
}

double integrate_volume(const RadialField& f) {
  const double four_pi = 4.0 * std::numbers::pi;
  return four_pi * integrate_extended(f.grid, [&](int i) {
    const double r = f.grid.r(i);
    return r * r * f.values[static_cast<size_t>(i)];
  });
}

double field_distance_l1(const RadialField& f, const RadialField& g) {
  require_same_grid(f, g);
  const double four_pi = 4.0 * std::numbers::pi;
  return four_pi * integrate_extended(f.grid, [&](int i) {
    const double r = f.grid.r(i);
    return r * r * std::abs(f.values[static_cast<size_t>(i)] -
                            g.values[static_cast<size_t>(i)]);
  });
}

}  // namespace hartree
