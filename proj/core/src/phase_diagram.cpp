#include "hartree/phase_diagram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

#include "hartree/errors.hpp"
#include "hartree/numerics.hpp"
#include "hartree/poisson.hpp"
#include "hartree/spectral.hpp"

namespace hartree {

namespace {

constexpr double kOccupiedThreshold = 1e-10;  // per unit mass, as in scf_solve

ScanPoint point_from(double temperature, const SolveResult& r, double mass) {
  ScanPoint pt;
  pt.temperature = temperature;
  pt.free_energy = r.breakdown.total;
  pt.e_kin = r.breakdown.e_kin;
  pt.e_pot = r.breakdown.e_pot;
  pt.entropy_term = r.breakdown.entropy_term;
  pt.mu = r.state.mu;
  pt.rank = r.rank;
  pt.iterations = r.iterations;
  pt.converged = r.converged;
  int occupied = 0;
  for (const LevelOccupation& lvl : r.state.occupations.levels) {
    if (lvl.lambda <= kOccupiedThreshold * mass) continue;
    ++occupied;
    if (occupied == 2) {
      pt.lambda2 = lvl.lambda;
      break;
    }
  }
  if (!r.converged) {
    pt.note = "did not converge within the iteration budget";
  } else if (pt.free_energy >= 0.0) {
    pt.note = "non-negative free energy: branch value above the maximal "
              "temperature";
  }
  return pt;
}

ScanPoint failed_point(double temperature, const char* what) {
  ScanPoint pt;
  pt.temperature = temperature;
  pt.converged = false;
  pt.note = what;
  return pt;
}

struct Probe {
  ScanPoint point;
  std::optional<SolveResult> result;
};

// Recoverable per-point failures become flagged records; anything signalling
// a misuse of the API (bad config, bad temperature) propagates.
Probe probe_point(double mass, double temperature, const EntropySpec& spec,
                  const SCFConfig& config, const RadialField* seed) {
  SCFConfig local = config;
  if (seed != nullptr) local.seed_density = *seed;
  try {
    SolveResult r = scf_solve(mass, temperature, spec, local);
    ScanPoint pt = point_from(temperature, r, mass);
    return {std::move(pt), std::move(r)};
  } catch (const MassNotAttainable& e) {
    return {failed_point(temperature, e.what()), std::nullopt};
  } catch (const ConvergenceFailure& e) {
    return {failed_point(temperature, e.what()), std::nullopt};
  } catch (const EmptySpectrum& e) {
    return {failed_point(temperature, e.what()), std::nullopt};
  } catch (const Stagnation& e) {
    return {failed_point(temperature, e.what()), std::nullopt};
  }
}

SolveResult scf_solve_seeded(double mass, double temperature,
                             const EntropySpec& spec, const SCFConfig& config,
                             const RadialField& seed) {
  SCFConfig local = config;
  local.seed_density = seed;
  return scf_solve(mass, temperature, spec, local);
}

SolveResult solve_or_throw(double mass, double temperature,
                           const EntropySpec& spec, const SCFConfig& config,
                           const RadialField* seed) {
  SCFConfig local = config;
  if (seed != nullptr) local.seed_density = *seed;
  SolveResult r = scf_solve(mass, temperature, spec, local);
  if (!r.converged) {
    throw ConvergenceFailure("solve at T = " + std::to_string(temperature) +
                             " did not converge");
  }
  return r;
}

int count_concavity_violations(const std::vector<ScanPoint>& pts) {
  if (pts.size() < 3) return 0;
  const double span =
      pts.back().temperature - pts.front().temperature;
  const double h0 = pts[1].temperature - pts[0].temperature;
  for (size_t k = 2; k < pts.size(); ++k) {
    const double hk = pts[k].temperature - pts[k - 1].temperature;
    if (std::abs(hk - h0) > 1e-9 * span) return 0;  // non-uniform grid
  }
  int violations = 0;
  for (size_t k = 1; k + 1 < pts.size(); ++k) {
    if (!pts[k - 1].converged || !pts[k].converged || !pts[k + 1].converged)
      continue;
    const double d2 = pts[k + 1].free_energy - 2.0 * pts[k].free_energy +
                      pts[k - 1].free_energy;
    if (d2 > 1e-8 * std::abs(pts[k].free_energy) + 1e-15) ++violations;
  }
  return violations;
}

}  // namespace

ScanResult temperature_scan(double mass, const EntropySpec& spec,
                            const std::vector<double>& temperatures,
                            const SCFConfig& config, ScanMode mode,
                            int threads) {
  for (size_t i = 0; i < temperatures.size(); ++i) {
    if (temperatures[i] <= 0.0)
      throw InvalidParameter("scan temperatures must be positive");
    if (i > 0 && temperatures[i] <= temperatures[i - 1])
      throw InvalidParameter("scan temperatures must be strictly increasing");
  }

  ScanResult out;
  out.points.resize(temperatures.size());
  if (temperatures.empty()) return out;

  if (mode == ScanMode::warm_started || threads <= 1 ||
      temperatures.size() == 1) {
    std::optional<RadialField> seed = config.seed_density;
    for (size_t i = 0; i < temperatures.size(); ++i) {
      const RadialField* sp = seed ? &*seed : nullptr;
      Probe p = probe_point(mass, temperatures[i], spec, config,
                            mode == ScanMode::warm_started ? sp : nullptr);
      out.points[i] = std::move(p.point);
      if (mode == ScanMode::warm_started && p.result && p.result->converged) {
        seed = p.result->state.density;
      }
    }
  } else {
    // First point on the calling thread so that configuration errors
    // propagate; the rest fan out over a small pool.
    out.points[0] = probe_point(mass, temperatures[0], spec, config, nullptr)
                        .point;
    std::atomic<size_t> next{1};
    const int n_workers = std::min<int>(
        threads, static_cast<int>(temperatures.size()) - 1);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= temperatures.size()) return;
          try {
            out.points[i] =
                probe_point(mass, temperatures[i], spec, config, nullptr)
                    .point;
          } catch (const Error& e) {
            out.points[i] = failed_point(temperatures[i], e.what());
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  out.concavity_violations = count_concavity_violations(out.points);
  return out;
}

double critical_temperature_formula(double mass, const EntropySpec& spec,
                                    const SolveResult& zero_t) {
  if (mass <= 0.0) throw InvalidParameter("mass must be positive");
  if (!zero_t.converged)
    throw InvalidParameter("zero-temperature input did not converge");
  const auto& entries = zero_t.state.spectrum.entries;
  if (entries.size() < 2)
    throw InsufficientSpectrum(
        "critical temperature formula needs two bound levels");
  const double gap = entries[1].eigenvalue - entries[0].eigenvalue;
  if (gap <= 0.0)
    throw InsufficientSpectrum("degenerate lowest levels: gap is not positive");
  return gap / spec.beta_prime(mass);
}

CriticalTemperatureResult find_critical_temperature(double mass,
                                                    const EntropySpec& spec,
                                                    const SCFConfig& config) {
  CriticalTemperatureResult out;
  const SolveResult zero_t = zero_temperature_solve(mass, config);
  out.t_c_formula = critical_temperature_formula(mass, spec, zero_t);

  // The second occupation behaves like an order parameter: it vanishes as
  // sqrt(T - T_c), so relaxation slows near the transition and probes just
  // above T_c need far more sweeps than bulk solves. Below T_c the warm
  // start reconverges immediately.
  SCFConfig probe_config = config;
  probe_config.max_iterations = std::max(config.max_iterations, 20000);

  RadialField seed = zero_t.state.density;
  auto probe = [&](double t) -> bool {
    SolveResult r = solve_or_throw(mass, t, spec, probe_config, &seed);
    seed = r.state.density;
    out.trace.push_back(point_from(t, r, mass));
    return r.rank > 1;
  };

  // Coarse upward sweep in units of the formula value to bracket the rank
  // transition, then bisect to relative width 1e-3, capped at 12 halvings.
  double lo = 0.0;
  double hi = 0.0;
  double t = 0.0;
  for (double f : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5}) {
    t = f * out.t_c_formula;
    if (probe(t)) {
      hi = t;
      break;
    }
    lo = t;
  }
  while (hi == 0.0) {
    t *= 1.5;
    if (t > 8.0 * out.t_c_formula)
      throw ConvergenceFailure(
          "no rank transition found below eight times the formula value");
    if (probe(t)) hi = t;
    else lo = t;
  }
  for (int k = 0; k < 12 && hi - lo > 1e-3 * out.t_c_formula; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid)) hi = mid;
    else lo = mid;
  }
  out.t_c_scan = 0.5 * (lo + hi);
  out.relative_gap =
      std::abs(out.t_c_scan - out.t_c_formula) / out.t_c_formula;
  return out;
}

double tstar_lower_bound(double mass, const EntropySpec& spec, double i_10) {
  if (mass <= 0.0) throw InvalidParameter("mass must be positive");
  if (i_10 >= 0.0)
    throw InvalidParameter("unit-mass ground energy must be negative");
  constexpr int kSamples = 256;
  double best = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double m =
        mass * std::pow(10.0, -4.0 * (1.0 - static_cast<double>(k) /
                                                (kSamples - 1)));
    const double value = m * m * m * (-i_10) / spec.beta(m);
    best = std::max(best, value);
  }
  return best;
}

TStarResult find_max_temperature(double mass, const EntropySpec& spec,
                                 const SCFConfig& config,
                                 double ceiling_factor) {
  if (ceiling_factor <= 0.0)
    throw InvalidParameter("ceiling factor must be positive");
  TStarResult out;
  const SolveResult zero_t = zero_temperature_solve(mass, config);
  out.t_c_formula = critical_temperature_formula(mass, spec, zero_t);
  out.ceiling = ceiling_factor * out.t_c_formula;
  const double i0 = zero_t.breakdown.total;
  if (i0 >= 0.0)
    throw ConvergenceFailure(
        "zero-temperature free energy is non-negative; the domain does not "
        "resolve the bound state");
  out.lower_bound = tstar_lower_bound(mass, spec, i0 / (mass * mass * mass));

  const double tol_zero = 1e-9 * std::abs(i0);
  RadialField seed = zero_t.state.density;

  // March upward until the branch reaches zero. T = 0 anchors the negative
  // side of the bracket. The start is offset from the critical temperature:
  // a probe landing exactly on T_c would sit on the marginal mode, where
  // relaxation is slowest. Probes keep an enlarged sweep budget for the
  // same reason.
  SCFConfig march_config = config;
  march_config.max_iterations = std::max(config.max_iterations, 20000);
  double t_lo = 0.0;
  double f_lo = i0;
  double t_hi = 0.0;
  double f_hi = 0.0;
  bool hi_finite = false;
  bool bracketed = false;
  double t = 0.55 * out.t_c_formula;
  while (true) {
    if (t > out.ceiling) {
      out.note = "free energy still negative at the probe ceiling";
      return out;
    }
    try {
      SolveResult r = scf_solve_seeded(mass, t, spec, march_config, seed);
      out.trace.push_back(point_from(t, r, mass));
      if (!r.converged) {
        out.note = "solver stalled before any sign change";
        return out;
      }
      seed = r.state.density;
      const double f = r.breakdown.total;
      if (f >= -tol_zero) {
        t_hi = t;
        f_hi = f;
        hi_finite = true;
        bracketed = true;
        break;
      }
      t_lo = t;
      f_lo = f;
      t *= 2.0;
    } catch (const MassNotAttainable& e) {
      out.trace.push_back(failed_point(t, e.what()));
      out.note = "basis capacity exhausted before any sign change";
      return out;
    }
  }

  // Secant from the negative side; concavity keeps the iterates ordered.
  // A probe that cannot carry the mass truncates the bracket from above
  // without a value, after which plain bisection takes over.
  double root = 0.5 * (t_lo + t_hi);
  for (int iter = 0; iter < 64 && bracketed; ++iter) {
    if (t_hi - t_lo <= 1e-6 * t_hi) break;
    double trial;
    if (hi_finite && f_hi > f_lo) {
      trial = t_lo - f_lo * (t_hi - t_lo) / (f_hi - f_lo);
      if (!(trial > t_lo && trial < t_hi)) trial = 0.5 * (t_lo + t_hi);
    } else {
      trial = 0.5 * (t_lo + t_hi);
    }
    try {
      SolveResult r = scf_solve_seeded(mass, trial, spec, march_config, seed);
      out.trace.push_back(point_from(trial, r, mass));
      if (!r.converged) {
        out.note = "refinement stalled; interval midpoint reported";
        root = 0.5 * (t_lo + t_hi);
        break;
      }
      seed = r.state.density;
      const double f = r.breakdown.total;
      if (std::abs(f) <= 1e-8 * std::abs(i0)) {
        root = trial;
        out.t_star = root;
        return out;
      }
      if (f < 0.0) {
        t_lo = trial;
        f_lo = f;
      } else {
        t_hi = trial;
        f_hi = f;
        hi_finite = true;
      }
    } catch (const MassNotAttainable& e) {
      out.trace.push_back(failed_point(trial, e.what()));
      t_hi = trial;
      hi_finite = false;
    }
  }
  if (hi_finite && f_hi > f_lo) {
    root = t_lo - f_lo * (t_hi - t_lo) / (f_hi - f_lo);
    root = std::clamp(root, t_lo, t_hi);
  } else {
    root = 0.5 * (t_lo + t_hi);
  }
  out.t_star = root;
  return out;
}

ScalingReport scaling_check(double mass, double temperature, double lambda,
                            double p, const SCFConfig& config) {
  if (lambda <= 0.0) throw InvalidParameter("scale must be positive");
  const EntropySpec spec = EntropySpec::power_law(p);

  auto solve_at = [&](double m, double t, double r_max) -> SolveResult {
    SCFConfig local = config;
    local.r_max = r_max;
    local.seed_density.reset();
    SolveResult r = (t == 0.0) ? zero_temperature_solve(m, local)
                               : scf_solve(m, t, spec, local);
    if (!r.converged)
      throw ConvergenceFailure("scaling check solve did not converge");
    return r;
  };

  const double t_scaled = std::pow(lambda, 3.0 - p) * temperature;
  const SolveResult base = solve_at(mass, temperature, config.r_max);
  const SolveResult scaled =
      solve_at(lambda * mass, t_scaled, config.r_max / lambda);

  ScalingReport rep;
  rep.lhs = scaled.breakdown.total;
  rep.rhs = lambda * lambda * lambda * base.breakdown.total;
  rep.margin = rep.rhs - rep.lhs;
  rep.inequality_ok = rep.lhs <= rep.rhs + 1e-3 * std::abs(rep.rhs) + 1e-12;

  // Exact dilation of the converged base state onto the scaled grid. The
  // scaled nodes are the base nodes divided by lambda, so the resampling is
  // node-aligned and the discrete functional transforms without resolution
  // loss; any inhomogeneity in the pipeline would show up here.
  const RadialGrid& g = base.state.density.grid;
  const RadialGrid g2 = make_grid(g.r_max / lambda, g.n_points);
  const double sqrt_lambda = std::sqrt(lambda);

  Spectrum spectrum2;
  spectrum2.grid = g2;
  OccupationSet occ2;
  occ2.temperature = t_scaled;
  double e_kin2 = 0.0;
  double entropy2 = 0.0;
  const auto& levels = base.state.occupations.levels;
  for (size_t j = 0; j < base.state.spectrum.entries.size(); ++j) {
    const SpectrumEntry& entry = base.state.spectrum.entries[j];
    const CubicInterpolant interp(g.h, g.h, entry.u);
    std::vector<double> u2(entry.u.size());
    for (int i = 0; i < g2.n_points; ++i) {
      u2[static_cast<size_t>(i)] = sqrt_lambda * interp(lambda * g2.r(i));
    }
    SpectrumEntry entry2 = entry;
    entry2.eigenvalue = lambda * lambda * entry.eigenvalue;
    entry2.u = std::move(u2);
    const double w = lambda * levels[j].lambda * entry.degeneracy;
    if (levels[j].lambda > 0.0) {
      e_kin2 += w * kinetic_energy_of_u(entry2.u, entry2.l, g2);
      if (base.state.entropy)
        entropy2 += entry.degeneracy * spec.beta(lambda * levels[j].lambda);
    }
    spectrum2.entries.push_back(std::move(entry2));
    LevelOccupation lvl = levels[j];
    lvl.eigenvalue = lambda * lambda * levels[j].eigenvalue;
    lvl.lambda = lambda * levels[j].lambda;
    occ2.levels.push_back(lvl);
    occ2.mass_realized += lvl.lambda * lvl.degeneracy;
  }
  const RadialField density2 = density_from_state(spectrum2, occ2);
  const Potential potential2 = potential_from_density(density2);
  const double e_pot2 = potential_energy(density2, potential2);
  rep.transform_value = e_kin2 - e_pot2 + t_scaled * entropy2;
  rep.transform_expected =
      lambda * lambda * lambda * base.breakdown.total;
  rep.transform_relative_error =
      std::abs(rep.transform_value - rep.transform_expected) /
      std::max(std::abs(rep.transform_expected), 1e-300);
  rep.transform_ok = rep.transform_relative_error <= 1e-6;
  return rep;
}

SubadditivityReport subadditivity_check(double mass, double m,
                                        double temperature,
                                        const EntropySpec& spec,
                                        const SCFConfig& config) {
  if (!(m > 0.0 && m < mass))
    throw InvalidParameter("split mass must lie strictly inside (0, M)");

  auto solve_at = [&](double mm) -> double {
    SCFConfig local = config;
    local.r_max = config.r_max * (mass / mm);  // weaker binding spreads
    local.seed_density.reset();
    SolveResult r = (temperature == 0.0)
                        ? zero_temperature_solve(mm, local)
                        : scf_solve(mm, temperature, spec, local);
    if (!r.converged)
      throw ConvergenceFailure("sub-additivity solve did not converge");
    return r.breakdown.total;
  };

  SubadditivityReport rep;
  rep.i_whole = solve_at(mass);
  rep.i_left = solve_at(mass - m);
  rep.i_right = solve_at(m);
  rep.gap = rep.i_left + rep.i_right - rep.i_whole;
  rep.ok = rep.i_whole <=
           rep.i_left + rep.i_right + 1e-3 * std::abs(rep.i_whole) + 1e-15;
  return rep;
}

}  // namespace hartree
