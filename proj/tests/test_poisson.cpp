#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hartree/poisson.hpp"
#include "test_helpers.hpp"

using namespace hartree;
using hartree::testing::ball_density;
using hartree::testing::ball_grid;
using hartree::testing::gaussian_density;

namespace {

// Direct double-quadrature of (1/2) int int n(x) n(y)/|x-y|: the spherical
// average of the kernel over shells is 1/max(r,s).  Trapezoid in both
// variables; fields vanish at the ends.
double direct_interaction_energy(const RadialField& n) {
  const RadialGrid& grid = n.grid;
  const double four_pi = 4.0 * std::numbers::pi;
  const int size = grid.n_points;
  std::vector<double> shell(static_cast<size_t>(size));
  for (int i = 0; i < size; ++i) {
    const double r = grid.r(i);
    shell[static_cast<size_t>(i)] = four_pi * r * r * n.values[static_cast<size_t>(i)];
  }
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    double inner = 0.0;
    for (int j = 0; j < size; ++j) {
      inner += shell[static_cast<size_t>(j)] / std::max(grid.r(i), grid.r(j));
    }
    total += shell[static_cast<size_t>(i)] * inner;
  }
  return 0.5 * total * grid.h * grid.h;
}

}  // namespace

TEST_CASE("zero density gives zero potential") {
  const RadialGrid grid = make_grid(10.0, 200);
  const Potential v = potential_from_density(make_field(grid));
  CHECK(v.total_mass == 0.0);
  for (double value : v.field.values) CHECK(value == 0.0);
  CHECK(potential_energy(make_field(grid), v) == 0.0);
}

TEST_CASE("uniform ball reproduces the closed form") {
  const double mass = 1.0, radius = 1.0;
  const RadialGrid grid = ball_grid(radius, 2000);
  const RadialField n = ball_density(grid, mass, radius);
  const Potential v = potential_from_density(n);

  // The density jump at the surface limits the cumulative rule to O(h) there.
  CHECK(v.total_mass == doctest::Approx(mass).epsilon(1e-6));

  double worst = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    const double r = grid.r(i);
    const double exact = r <= radius
        ? mass * (3.0 * radius * radius - r * r) / (2.0 * radius * radius * radius)
        : mass / r;
    worst = std::max(worst,
                     std::abs(v.field.values[static_cast<size_t>(i)] - exact) / exact);
  }
  CHECK(worst < 1e-5);

  const double self_energy = potential_energy(n, v);
  CHECK(self_energy ==
        doctest::Approx(3.0 * mass * mass / (5.0 * radius)).epsilon(1e-5));
}

TEST_CASE("ball potential error shrinks under refinement") {
  auto worst_error = [](int intervals_per_radius) {
    const RadialGrid grid = ball_grid(1.0, intervals_per_radius);
    const RadialField n = ball_density(grid, 1.0, 1.0);
    const Potential v = potential_from_density(n);
    double worst = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
      const double r = grid.r(i);
      const double exact = r <= 1.0 ? (3.0 - r * r) / 2.0 : 1.0 / r;
      worst = std::max(worst,
                       std::abs(v.field.values[static_cast<size_t>(i)] - exact));
    }
    return worst;
  };
  const double coarse = worst_error(250);
  const double fine = worst_error(500);
  CHECK(fine < coarse);
  CHECK(coarse / fine > 2.0);
}

TEST_CASE("far field of a compact density is M/r") {
  const RadialGrid grid = make_grid(10.0, 2000);
  const RadialField n = gaussian_density(grid, 1.0, 0.1);
  const Potential v = potential_from_density(n);

  // Outside the support the shell formula reduces to total mass over r.
  int node_5 = static_cast<int>(std::round(5.0 / grid.h)) - 1;
  CHECK(v.field.values[static_cast<size_t>(node_5)] ==
        doctest::Approx(v.total_mass / grid.r(node_5)).epsilon(1e-12));
  CHECK(v.field.values[static_cast<size_t>(node_5)] == doctest::Approx(0.2).epsilon(1e-4));

  const int last = grid.n_points - 1;
  CHECK(v.field.values[static_cast<size_t>(last)] * grid.r(last) ==
        doctest::Approx(v.total_mass).epsilon(1e-12));
  CHECK(v.total_mass == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("Gaussian interaction energy against the direct double sum") {
  const RadialGrid grid = make_grid(10.0, 1200);
  const RadialField n = gaussian_density(grid, 1.0, 1.0);
  const Potential v = potential_from_density(n);
  const double fast = potential_energy(n, v);
  const double direct = direct_interaction_energy(n);
  CHECK(fast == doctest::Approx(direct).epsilon(1e-5));

  // Closed form for a unit-mass Gaussian of width 1: 1 / (2 sqrt(pi)).
  CHECK(fast == doctest::Approx(1.0 / (2.0 * std::sqrt(std::numbers::pi)))
                    .epsilon(1e-7));
}

TEST_CASE("interaction energy scales linearly under mass-preserving dilation") {
  const RadialGrid grid = make_grid(14.0, 1600);
  const double lambda = 1.5;
  const RadialField n = gaussian_density(grid, 1.0, 1.0);
  const RadialField n_scaled = gaussian_density(grid, 1.0, 1.0 / lambda);
  const double base = potential_energy(n, potential_from_density(n));
  const double scaled =
      potential_energy(n_scaled, potential_from_density(n_scaled));
  CHECK(scaled == doctest::Approx(lambda * base).epsilon(1e-6));
}

TEST_CASE("discrete Poisson residual is small for smooth densities") {
  const RadialGrid grid = make_grid(10.0, 2000);
  const RadialField n = gaussian_density(grid, 1.0, 1.0);
  const Potential v = potential_from_density(n);

  // (r V)'' = -4 pi r n, with rV -> 0 at the origin and -> M at r_max.
  const double four_pi = 4.0 * std::numbers::pi;
  double worst = 0.0;
  for (int i = 1; i + 1 < grid.n_points; ++i) {
    const double w_m = grid.r(i - 1) * v.field.values[static_cast<size_t>(i - 1)];
    const double w_0 = grid.r(i) * v.field.values[static_cast<size_t>(i)];
    const double w_p = grid.r(i + 1) * v.field.values[static_cast<size_t>(i + 1)];
    const double lap = (w_p - 2.0 * w_0 + w_m) / (grid.h * grid.h);
    worst = std::max(worst,
                     std::abs(lap + four_pi * grid.r(i) *
                                        n.values[static_cast<size_t>(i)]));
  }
  CHECK(worst < 2e-4);
}

TEST_CASE("input validation") {
  const RadialGrid grid = make_grid(10.0, 200);
  RadialField n = make_field(grid);
  n.values[10] = -1e-9;
  CHECK_THROWS_AS(potential_from_density(n), NegativeDensity);

  const RadialField ok = gaussian_density(grid, 1.0, 1.0);
  const Potential v = potential_from_density(ok);
  const RadialField other = make_field(make_grid(10.0, 300));
  CHECK_THROWS_AS(potential_energy(other, v), GridMismatch);
}
