#include "hartree/poisson.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hartree/numerics.hpp"

namespace hartree {

Potential potential_from_density(const RadialField& density) {
  const RadialGrid& grid = density.grid;
  const int n = grid.n_points;
  const double four_pi = 4.0 * std::numbers::pi;

  for (int i = 0; i < n; ++i) {
    if (density.values[static_cast<size_t>(i)] < 0.0) {
      throw NegativeDensity("potential_from_density: density negative at r = " +
                            std::to_string(grid.r(i)));
    }
  }

  // Extended sample sets including both Dirichlet endpoints.  s^2 n and s n
  // both vanish at s = 0 (n bounded) and at s = r_max (truncation).
  std::vector<double> shell(static_cast<size_t>(n) + 2, 0.0);
  std::vector<double> line(static_cast<size_t>(n) + 2, 0.0);
  for (int i = 0; i < n; ++i) {
    const double r = grid.r(i);
    const double v = density.values[static_cast<size_t>(i)];
    shell[static_cast<size_t>(i) + 1] = r * r * v;
    line[static_cast<size_t>(i) + 1] = r * v;
  }

  const std::vector<double> inner = cumulative_integral(shell, grid.h);
  const std::vector<double> outer = cumulative_integral(line, grid.h);
  const double line_total = outer.back();

  Potential potential;
  potential.field = make_field(grid);
  potential.total_mass = four_pi * inner.back();
  for (int i = 0; i < n; ++i) {
    const double r = grid.r(i);
    potential.field.values[static_cast<size_t>(i)] =
        four_pi * (inner[static_cast<size_t>(i) + 1] / r +
                   (line_total - outer[static_cast<size_t>(i) + 1]));
  }
  return potential;
}

double potential_energy(const RadialField& density, const Potential& potential) {
  require_same_grid(density, potential.field);
  RadialField product = make_field(density.grid);
  for (size_t i = 0; i < product.values.size(); ++i) {
    product.values[i] = density.values[i] * potential.field.values[i];
  }
  return 0.5 * integrate_volume(product);
}

}  // namespace hartree
