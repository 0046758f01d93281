#include "hartree/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hartree/tridiag.hpp"

namespace hartree {

namespace {

constexpr double kResidualTol = 1e-8;

// Modified Gram-Schmidt of x against prior, then renormalize.
void orthogonalize(std::vector<double>& x,
                   const std::vector<std::vector<double>>& prior,
                   size_t first, size_t last) {
  for (size_t j = first; j < last; ++j) {
    double dot = 0.0;
    for (size_t i = 0; i < x.size(); ++i) dot += x[i] * prior[j][i];
    for (size_t i = 0; i < x.size(); ++i) x[i] -= dot * prior[j][i];
  }
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    throw ConvergenceFailure("channel_eigensolve: orthogonalization collapsed");
  }
  for (double& v : x) v /= norm;
}

}  // namespace

ChannelOperator make_channel_operator(const Potential& potential, int l) {
  if (l < 0) {
    throw InvalidParameter("make_channel_operator: l must be nonnegative");
  }
  const RadialGrid& grid = potential.field.grid;
  ChannelOperator op;
  op.l = l;
  op.grid = grid;
  op.off = -1.0 / (grid.h * grid.h);
  op.diag.resize(static_cast<size_t>(grid.n_points));
  const double centrifugal = static_cast<double>(l) * (l + 1.0);
  for (int i = 0; i < grid.n_points; ++i) {
    const double r = grid.r(i);
    op.diag[static_cast<size_t>(i)] = 2.0 / (grid.h * grid.h) +
                                      centrifugal / (r * r) -
                                      potential.field.values[static_cast<size_t>(i)];
  }
  return op;
}

std::vector<EigenPair> channel_eigensolve(const Potential& potential, int l,
                                          int k) {
  const ChannelOperator op = make_channel_operator(potential, l);
  const int n = op.grid.n_points;
  if (k < 1) {
    throw InvalidParameter("channel_eigensolve: k must be positive");
  }
  k = std::min(k, n);

  const std::vector<double> sub(static_cast<size_t>(n) - 1, op.off);
  const std::vector<double> lambda = tridiag::lowest_eigenvalues(op.diag, sub, k);

  double scale = 0.0;
  for (double d : op.diag) scale = std::max(scale, std::abs(d));
  scale = std::max(scale, std::abs(op.off));

  std::vector<EigenPair> pairs(static_cast<size_t>(k));
  std::vector<std::vector<double>> vectors(static_cast<size_t>(k));
  size_t group_start = 0;
  for (size_t j = 0; j < static_cast<size_t>(k); ++j) {
    std::vector<double> x = tridiag::eigenvector(op.diag, sub, lambda[j]);
    // Sturm-Liouville channels have simple spectra; clusters only appear
    // when bisection cannot separate levels, and those get reorthogonalized.
    if (j > 0 && lambda[j] - lambda[j - 1] > 1e-10 * scale) group_start = j;
    if (group_start < j) orthogonalize(x, vectors, group_start, j);

    const double res = tridiag::residual_norm(op.diag, sub, lambda[j], x);
    if (res > kResidualTol * scale) {
      throw ConvergenceFailure("channel_eigensolve: residual " +
                               std::to_string(res) + " for l = " +
                               std::to_string(l));
    }

    // Fix the overall sign so u rises from the origin positively.
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    double lead = x[0];
    for (double v : x) {
      if (std::abs(v) > 0.1 * peak) {
        lead = v;
        break;
      }
    }
    const double sign = lead < 0.0 ? -1.0 : 1.0;

    // Continuum normalization int u^2 dr = h sum u_i^2 = 1.
    const double rescale = sign / std::sqrt(op.grid.h);
    vectors[j] = x;
    pairs[j].eigenvalue = lambda[j];
    pairs[j].u.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      pairs[j].u[static_cast<size_t>(i)] = rescale * x[static_cast<size_t>(i)];
    }
  }
  return pairs;
}

Spectrum full_spectrum(const Potential& potential, int l_max, int k_per_channel,
                       double bound_cutoff) {
  if (l_max < 0 || k_per_channel < 1) {
    throw InvalidParameter("full_spectrum: l_max and k_per_channel out of range");
  }
  Spectrum spectrum;
  spectrum.grid = potential.field.grid;
  for (int l = 0; l <= l_max; ++l) {
    std::vector<EigenPair> pairs = channel_eigensolve(potential, l, k_per_channel);
    int retained = 0;
    for (size_t j = 0; j < pairs.size(); ++j) {
      if (!(pairs[j].eigenvalue < -bound_cutoff)) break;
      SpectrumEntry entry;
      entry.l = l;
      entry.n = static_cast<int>(j);
      entry.eigenvalue = pairs[j].eigenvalue;
      entry.degeneracy = 2 * l + 1;
      entry.u = std::move(pairs[j].u);
      spectrum.entries.push_back(std::move(entry));
      ++retained;
    }
    // Adding the centrifugal term only raises levels, so a channel without
    // bound states ends the search.
    if (retained == 0) break;
  }
  std::sort(spectrum.entries.begin(), spectrum.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) {
              if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
              if (a.l != b.l) return a.l < b.l;
              return a.n < b.n;
            });
  return spectrum;
}

double kinetic_energy_of_u(const std::vector<double>& u, int l,
                           const RadialGrid& grid) {
  const int n = grid.n_points;
  const double h = grid.h;
  double gradient = 0.0;
  double previous = 0.0;  // u(0) = 0
  for (int i = 0; i < n; ++i) {
    const double diff = u[static_cast<size_t>(i)] - previous;
    gradient += diff * diff;
    previous = u[static_cast<size_t>(i)];
  }
  gradient += previous * previous;  // step to u(r_max) = 0
  gradient /= h;

  double centrifugal = 0.0;
  if (l > 0) {
    const double ll = static_cast<double>(l) * (l + 1.0);
    for (int i = 0; i < n; ++i) {
      const double r = grid.r(i);
      centrifugal += u[static_cast<size_t>(i)] * u[static_cast<size_t>(i)] / (r * r);
    }
    centrifugal *= ll * h;
  }
  return gradient + centrifugal;
}

double kinetic_energy_of_entry(const SpectrumEntry& entry, const RadialGrid& grid) {
  return kinetic_energy_of_u(entry.u, entry.l, grid);
}

}  // namespace hartree
