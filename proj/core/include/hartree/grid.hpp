#pragma once

#include <vector>

#include "hartree/errors.hpp"

namespace hartree {

/// Uniform radial grid on (0, r_max) with Dirichlet endpoints.
///
/// The spacing is h = r_max / (n_points + 1) and the stored nodes are the
/// interior points r_i = i * h, i = 1..n_points.  The endpoints r = 0 and
/// r = r_max carry no degrees of freedom: reduced wavefunctions and densities
/// are treated as zero there.
struct RadialGrid {
  double r_max = 0.0;
  int n_points = 0;
  double h = 0.0;

  /// Node position, i in [0, n_points) maps to r = (i + 1) * h.
  double r(int i) const { return h * static_cast<double>(i + 1); }

  bool operator==(const RadialGrid& other) const {
    return r_max == other.r_max && n_points == other.n_points;
  }
};

/// Scalar field sampled on the interior nodes of a RadialGrid.
struct RadialField {
  RadialGrid grid;
  std::vector<double> values;
};

/// Builds a grid, validating r_max > 0 and n_points >= 16.
RadialGrid make_grid(double r_max, int n_points);

/// Zero-initialized field on the given grid.
RadialField make_field(const RadialGrid& grid);

/// Samples f(r) at every node.
template <typename F>
RadialField sample_field(const RadialGrid& grid, F&& f) {
  RadialField field = make_field(grid);
  for (int i = 0; i < grid.n_points; ++i) {
    field.values[static_cast<size_t>(i)] = f(grid.r(i));
  }
  return field;
}

/// Volume integral 4*pi * int r^2 f(r) dr over [0, r_max].
///
/// Composite Simpson over the node set extended by the two (zero-valued)
/// endpoints; when the interval count is odd the last interval, which sits
/// at r_max where fields vanish, falls back to the trapezoid rule.
double integrate_volume(const RadialField& f);

/// L1 volume distance int |f - g| dx.  Throws GridMismatch.
double field_distance_l1(const RadialField& f, const RadialField& g);

/// Throws GridMismatch unless both fields share one grid.
void require_same_grid(const RadialField& f, const RadialField& g);

}  // namespace hartree
