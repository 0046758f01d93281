#include "hartree/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "hartree/errors.hpp"
#include "hartree/numerics.hpp"
#include "hartree/spectral.hpp"

namespace hartree::oracle {

namespace {

void normalize(std::vector<double>& u, double h) {
  double sum = 0.0;
  for (double value : u) sum += value * value;
  const double norm = std::sqrt(h * sum);
  if (!(norm > 0.0)) throw ConvergenceFailure("descent iterate vanished");
  for (double& value : u) value /= norm;
}

/// Solves (I + tau * A) x = b for the constant-coefficient Dirichlet
/// Laplacian A = tridiag(-1/h^2, 2/h^2, -1/h^2) by the Thomas algorithm.
std::vector<double> semi_implicit_solve(const std::vector<double>& b, double h,
                                        double tau) {
  const int n = static_cast<int>(b.size());
  const double diag = 1.0 + 2.0 * tau / (h * h);
  const double off = -tau / (h * h);
  std::vector<double> c(n), x(n);
  double denom = diag;
  c[0] = off / denom;
  x[0] = b[0] / denom;
  for (int i = 1; i < n; ++i) {
    denom = diag - off * c[i - 1];
    c[i] = off / denom;
    x[i] = (b[i] - off * x[i - 1]) / denom;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  return x;
}

double kinetic_part(const std::vector<double>& u, double h, double mass) {
  const int n = static_cast<int>(u.size());
  double sum = u[0] * u[0];
  for (int i = 1; i < n; ++i) {
    const double d = u[i] - u[i - 1];
    sum += d * d;
  }
  sum += u[n - 1] * u[n - 1];
  return mass * sum / h;
}

double potential_part(const std::vector<double>& u,
                      const std::vector<double>& w, double h, double mass) {
  double sum = 0.0;
  for (size_t k = 0; k < u.size(); ++k) sum += u[k] * u[k] * w[k];
  return 0.5 * mass * mass * h * sum;
}

}  // namespace

std::vector<double> direct_potential_w(const std::vector<double>& u,
                                       const RadialGrid& grid) {
  const int n = grid.n_points;
  if (static_cast<int>(u.size()) != n) {
    throw GridMismatch("wavefunction length does not match the grid");
  }
  std::vector<double> u2(u.size()), u2_over_r(u.size());
  for (int j = 0; j < n; ++j) {
    u2[j] = u[j] * u[j];
    u2_over_r[j] = u2[j] / grid.r(j);
  }
  std::vector<double> w(u.size());
  for (int k = 0; k < n; ++k) {
    double near = 0.0;
    for (int j = 0; j <= k; ++j) near += u2[j];
    double far = 0.0;
    for (int j = k + 1; j < n; ++j) far += u2_over_r[j];
    w[k] = grid.h * (near / grid.r(k) + far);
  }
  return w;
}

double rank1_energy(const std::vector<double>& u, const RadialGrid& grid,
                    double mass) {
  const std::vector<double> w = direct_potential_w(u, grid);
  return kinetic_part(u, grid.h, mass) - potential_part(u, w, grid.h, mass);
}

std::vector<double> rank1_gradient(const std::vector<double>& u,
                                   const RadialGrid& grid, double mass) {
  const int n = grid.n_points;
  const double h = grid.h;
  const std::vector<double> w = direct_potential_w(u, grid);
  std::vector<double> g(u.size());
  for (int k = 0; k < n; ++k) {
    const double left = (k > 0) ? u[k - 1] : 0.0;
    const double right = (k + 1 < n) ? u[k + 1] : 0.0;
    g[k] = 2.0 * mass * (2.0 * u[k] - left - right) / h -
           2.0 * mass * mass * h * u[k] * w[k];
  }
  return g;
}

Rank1Result rank1_descent(double mass, const RadialGrid& grid, double step,
                          int iterations) {
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  if (!(step > 0.0)) throw InvalidParameter("step must be positive");
  if (iterations < 1) throw InvalidParameter("iterations must be positive");

  const int n = grid.n_points;
  const double h = grid.h;
  const double sigma = grid.r_max / 10.0;
  std::vector<double> u(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = grid.r(i);
    u[static_cast<size_t>(i)] = r * std::exp(-0.5 * r * r / (sigma * sigma));
  }
  normalize(u, h);

  std::vector<double> w = direct_potential_w(u, grid);
  double e_kin = kinetic_part(u, h, mass);
  double e_pot = potential_part(u, w, h, mass);
  double energy = e_kin - e_pot;

  auto accept_if_lower = [&](std::vector<double>& trial) {
    normalize(trial, h);
    const std::vector<double> w_trial = direct_potential_w(trial, grid);
    const double kin_trial = kinetic_part(trial, h, mass);
    const double pot_trial = potential_part(trial, w_trial, h, mass);
    const double e_trial = kin_trial - pot_trial;
    if (e_trial > energy + 1e-15 * std::abs(energy)) return false;
    u.swap(trial);
    w = w_trial;
    e_kin = kin_trial;
    e_pot = pot_trial;
    energy = e_trial;
    return true;
  };

  // The breathing mode along dilations converges slowly under plain descent,
  // so a mass-preserving rescale to the virial optimum is offered as a move
  // of its own; it is subject to the same monotone acceptance.
  auto try_dilation = [&]() {
    if (!(e_kin > 0.0)) return false;
    const double scale = e_pot / (2.0 * e_kin);
    if (!(scale > 0.25 && scale < 4.0)) return false;
    const CubicInterpolant interp(grid.r(0), h, u);
    std::vector<double> trial(u.size());
    for (int i = 0; i < n; ++i) {
      trial[static_cast<size_t>(i)] =
          std::sqrt(scale) * interp(scale * grid.r(i));
    }
    double sum = 0.0;
    for (double value : trial) sum += value * value;
    if (!(sum > 0.0)) return false;
    return accept_if_lower(trial);
  };

  // The lagged potential makes the terminal phase a single-mode geometric
  // creep, so Aitken extrapolation over the last accepted iterates is offered
  // as another monotone move; it collapses thousands of creep steps at once.
  std::vector<std::vector<double>> history;
  auto try_aitken = [&]() {
    if (history.size() < 3) return false;
    const std::vector<double>& a = history[0];
    const std::vector<double>& b = history[1];
    const std::vector<double>& c = history[2];
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
      const double d1 = b[i] - a[i];
      const double d2 = c[i] - b[i];
      num += d2 * d1;
      den += d1 * d1;
    }
    if (!(den > 0.0)) return false;
    const double rho = num / den;
    if (!(rho > 0.2 && rho < 0.999999)) return false;
    const double gain = rho / (1.0 - rho);
    std::vector<double> trial(u.size());
    for (size_t i = 0; i < u.size(); ++i) trial[i] = c[i] + gain * (c[i] - b[i]);
    return accept_if_lower(trial);
  };
  auto record_iterate = [&]() {
    history.push_back(u);
    if (history.size() > 3) history.erase(history.begin());
  };

  // Relative eigen-residual of u against its own mean-field Hamiltonian;
  // drops near rounding exactly at the discrete minimizer, so it separates a
  // genuine fixed point from a creep stalled by a collapsed step size.
  auto eigen_residual = [&]() {
    std::vector<double> y(u.size());
    for (int i = 0; i < n; ++i) {
      const double left = (i > 0) ? u[i - 1] : 0.0;
      const double right = (i + 1 < n) ? u[i + 1] : 0.0;
      y[static_cast<size_t>(i)] =
          (2.0 * u[i] - left - right) / (h * h) - mass * w[i] * u[i];
    }
    double theta = 0.0;
    for (size_t i = 0; i < u.size(); ++i) theta += u[i] * y[i];
    theta *= h;
    double res = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
      const double d = y[i] - theta * u[i];
      res += d * d;
    }
    return std::sqrt(h * res) / std::max(std::abs(theta), 1e-2);
  };

  // One outer trial = a burst of imaginary-time steps against the frozen
  // potential (cheap tridiagonal solves), then one O(n^2) potential refresh
  // with monotone acceptance.  Shrinking the step on rejection turns this
  // into a damped alternation, which always admits a descending path.
  double tau = step;
  int accepted = 0;
  int tiny_streak = 0;
  bool converged = false;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> trial = u;
    for (int burst = 0; burst < 50; ++burst) {
      std::vector<double> rhs(trial.size());
      for (int k = 0; k < n; ++k) rhs[k] = trial[k] + tau * mass * w[k] * trial[k];
      std::vector<double> next = semi_implicit_solve(rhs, h, tau);
      normalize(next, h);
      double moved = 0.0;
      for (size_t i = 0; i < next.size(); ++i) {
        const double d = next[i] - trial[i];
        moved += d * d;
      }
      trial.swap(next);
      if (h * moved <= 1e-24) break;
    }

    const double before = energy;
    if (accept_if_lower(trial)) {
      ++accepted;
      record_iterate();
      if (accepted % 3 == 0 && accepted <= 30 && try_dilation()) {
        history.clear();
        record_iterate();
      }
      if (accepted % 4 == 0 && try_aitken()) {
        history.clear();
        record_iterate();
      }
      const double drop = before - energy;
      if (drop <= 1e-11 * std::abs(energy) + 1e-16) {
        if (++tiny_streak >= 3) {
          tiny_streak = 0;
          if (try_dilation() || try_aitken()) {
            history.clear();
            record_iterate();
          } else if (eigen_residual() <= 1e-4) {
            converged = true;
            break;
          } else {
            // Tiny drops with a large residual mean the step collapsed
            // somewhere steep earlier; regrow it and keep descending.
            tau = std::min(2.0 * tau, step);
            history.clear();
          }
        }
      } else {
        tiny_streak = 0;
      }
    } else {
      tau *= 0.5;
      history.clear();
      if (tau < 1e-14) {
        // No step of any size descends: we are at the discrete minimum.
        if (accepted == 0 && !try_dilation()) {
          throw Stagnation("rank-1 descent made no progress");
        }
        converged = true;
        break;
      }
    }
  }

  Rank1Result result;
  result.u = make_field(grid);
  result.u.values = std::move(u);
  result.energy = energy;
  result.e_kin = e_kin;
  result.e_pot = e_pot;
  result.iterations = accepted;
  result.converged = converged;
  return result;
}

ReferenceValues reference_values(const RadialGrid& grid) {
  const Rank1Result r1 = rank1_descent(1.0, grid);
  if (!r1.converged) {
    throw ConvergenceFailure("rank-1 descent did not converge on this grid");
  }

  Potential v;
  v.field = make_field(grid);
  v.field.values = direct_potential_w(r1.u.values, grid);  // mass 1: V = W
  v.total_mass = 1.0;

  const Spectrum spectrum = full_spectrum(v, 2, 3);
  if (spectrum.entries.size() < 2) {
    throw InsufficientSpectrum("oracle potential exposes fewer than 2 levels");
  }

  ReferenceValues values;
  values.i_10 = r1.energy;
  values.mu0_0 = spectrum.entries[0].eigenvalue;
  values.mu0_1 = spectrum.entries[1].eigenvalue;
  values.r_max = grid.r_max;
  values.n_points = grid.n_points;

  const double expected = 3.0 * values.i_10;
  if (std::abs(values.mu0_0 - expected) > 1e-3 * std::abs(expected)) {
    throw ValidationError("lowest eigenvalue is inconsistent with 3 * i_10");
  }
  return values;
}

void write_reference(const ReferenceValues& values, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open reference fixture for writing: " + path);
  char line[64];
  std::snprintf(line, sizeof line, "%.17g", values.i_10);
  out << "i_10 = " << line << "\n";
  std::snprintf(line, sizeof line, "%.17g", values.mu0_0);
  out << "mu0_0 = " << line << "\n";
  std::snprintf(line, sizeof line, "%.17g", values.mu0_1);
  out << "mu0_1 = " << line << "\n";
  std::snprintf(line, sizeof line, "%.17g", values.r_max);
  out << "r_max = " << line << "\n";
  out << "n_points = " << values.n_points << "\n";
  if (!out) throw Error("failed writing reference fixture: " + path);
}

ReferenceValues read_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open reference fixture: " + path);
  ReferenceValues values;
  bool seen_i = false, seen_mu0 = false, seen_mu1 = false, seen_rmax = false,
       seen_n = false;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string key, equals, value;
    if (!(fields >> key)) continue;  // blank
    if (!(fields >> equals >> value) || equals != "=") {
      throw ParseError("reference fixture line " + std::to_string(line_number) +
                       ": expected `key = value`");
    }
    try {
      if (key == "i_10") {
        values.i_10 = std::stod(value);
        seen_i = true;
      } else if (key == "mu0_0") {
        values.mu0_0 = std::stod(value);
        seen_mu0 = true;
      } else if (key == "mu0_1") {
        values.mu0_1 = std::stod(value);
        seen_mu1 = true;
      } else if (key == "r_max") {
        values.r_max = std::stod(value);
        seen_rmax = true;
      } else if (key == "n_points") {
        values.n_points = std::stoi(value);
        seen_n = true;
      } else {
        throw ParseError("reference fixture line " +
                         std::to_string(line_number) + ": unknown key " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("reference fixture line " + std::to_string(line_number) +
                       ": malformed number " + value);
    }
  }
  if (!(seen_i && seen_mu0 && seen_mu1 && seen_rmax && seen_n)) {
    throw ParseError("reference fixture is missing required keys");
  }
  return values;
}

double frozen_free_energy(const std::vector<FrozenLevel>& levels,
                          const std::vector<double>& lambda,
                          double temperature, const EntropySpec& spec) {
  if (levels.size() != lambda.size()) {
    throw InvalidParameter("occupation count does not match level count");
  }
  if (!(temperature > 0.0)) throw InvalidTemperature("frozen F requires T > 0");
  double total = 0.0;
  for (size_t j = 0; j < levels.size(); ++j) {
    total += levels[j].degeneracy *
             (lambda[j] * levels[j].eigenvalue + temperature * spec.beta(lambda[j]));
  }
  return total;
}

GridSearchResult brute_force_free_energy(const std::vector<FrozenLevel>& levels,
                                         double mass, double temperature,
                                         const EntropySpec& spec,
                                         int resolution) {
  if (levels.empty() || levels.size() > 3) {
    throw InvalidParameter("grid search handles 1 to 3 levels");
  }
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  if (!(temperature > 0.0)) throw InvalidTemperature("grid search requires T > 0");
  if (resolution < 8) throw InvalidParameter("resolution too small");

  const size_t last = levels.size() - 1;
  if (last == 0) {
    const std::vector<double> lambda{mass / levels[0].degeneracy};
    return {frozen_free_energy(levels, lambda, temperature, spec), lambda};
  }

  // The mass constraint eliminates the last level; the remaining one or two
  // occupations are scanned on a box that zooms around the incumbent.
  std::vector<double> lo(last, 0.0), hi(last);
  for (size_t j = 0; j < last; ++j) hi[j] = mass / levels[j].degeneracy;

  GridSearchResult best;
  best.free_energy = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * mass;

  for (int pass = 0; pass < 4; ++pass) {
    std::vector<double> arg(last, 0.0);
    std::vector<double> step(last);
    for (size_t j = 0; j < last; ++j) step[j] = (hi[j] - lo[j]) / resolution;

    const int outer = resolution;
    const int inner = (last == 2) ? resolution : 0;
    for (int a = 0; a <= outer; ++a) {
      arg[0] = lo[0] + a * step[0];
      for (int b = 0; b <= inner; ++b) {
        if (last == 2) arg[1] = lo[1] + b * step[1];
        double carried = 0.0;
        for (size_t j = 0; j < last; ++j) carried += levels[j].degeneracy * arg[j];
        double tail = (mass - carried) / levels[last].degeneracy;
        if (tail < -slack) continue;
        tail = std::max(tail, 0.0);

        std::vector<double> lambda(arg);
        lambda.push_back(tail);
        const double f = frozen_free_energy(levels, lambda, temperature, spec);
        if (f < best.free_energy) {
          best.free_energy = f;
          best.lambda = lambda;
        }
      }
    }

    // Zoom on the incumbent for the next pass.
    for (size_t j = 0; j < last; ++j) {
      const double center = best.lambda[j];
      const double radius = 2.0 * step[j];
      lo[j] = std::max(0.0, center - radius);
      hi[j] = std::min(mass / levels[j].degeneracy, center + radius);
    }
  }
  return best;
}

}  // namespace hartree::oracle
