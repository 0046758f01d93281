#pragma once

#include <vector>

namespace hartree::tridiag {

/// Symmetric tridiagonal matrix: diagonal d (size n) and subdiagonal e
/// (size n-1, e[i] couples rows i and i+1).

/// Number of eigenvalues strictly below x (Sturm sequence sign count).
int count_below(const std::vector<double>& d, const std::vector<double>& e,
                double x);

/// The k smallest eigenvalues in ascending order, bisected to near machine
/// precision relative to the Gershgorin span.
std::vector<double> lowest_eigenvalues(const std::vector<double>& d,
                                       const std::vector<double>& e, int k);

/// Eigenvector for an eigenvalue estimate, by inverse iteration with a
/// partially pivoted tridiagonal factorization.  Unit Euclidean norm.
std::vector<double> eigenvector(const std::vector<double>& d,
                                const std::vector<double>& e, double lambda);

/// Residual ||A v - lambda v||_2 for a unit vector v.
double residual_norm(const std::vector<double>& d, const std::vector<double>& e,
                     double lambda, const std::vector<double>& v);

}  // namespace hartree::tridiag
