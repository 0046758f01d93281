#pragma once

#include "hartree/grid.hpp"

namespace hartree {

/// Newtonian potential V = n * 1/|x| of a radial density, sampled on the
/// density's grid.  V is nonnegative; the Hamiltonian uses -V.
struct Potential {
  RadialField field;
  double total_mass = 0.0;  // 4*pi int s^2 n ds over the whole grid
};

/// Shell formula in one O(n) pass over cumulative integrals:
///   V(r) = (4*pi/r) int_0^r s^2 n ds + 4*pi int_r^rmax s n ds.
/// Outside the support of n this reduces to total_mass / r exactly.
/// Throws NegativeDensity if n carries a negative value.
Potential potential_from_density(const RadialField& density);

/// Interaction energy (1/2) int n V dx.  Throws GridMismatch.
double potential_energy(const RadialField& density, const Potential& potential);

}  // namespace hartree
