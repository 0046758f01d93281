#include "hartree/scf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

#include "hartree/errors.hpp"
#include "hartree/numerics.hpp"

namespace hartree {
namespace {

constexpr double kEnergyFloor = 1e-12;  // absolute part of the energy tolerance

void check_config(const SCFConfig& config) {
  if (!(config.mixing > 0.0) || config.mixing > 1.0) {
    throw InvalidParameter("mixing must lie in (0, 1]");
  }
  if (config.max_iterations < 1) {
    throw InvalidParameter("max_iterations must be at least 1");
  }
  if (!(config.tol_density > 0.0)) {
    throw InvalidParameter("tol_density must be positive");
  }
  if (!(config.tol_energy > 0.0)) {
    throw InvalidParameter("tol_energy must be positive");
  }
  if (config.l_max < 0) {
    throw InvalidParameter("l_max must be nonnegative");
  }
  if (config.k_per_channel < 1) {
    throw InvalidParameter("k_per_channel must be at least 1");
  }
}

void rescale_to_mass(RadialField& density, double mass) {
  const double got = integrate_volume(density);
  if (!(got > 0.0)) {
    throw ConvergenceFailure("density lost its mass during mixing");
  }
  const double factor = mass / got;
  for (double& v : density.values) v *= factor;
}

RadialField gaussian_seed(const RadialGrid& grid, double mass) {
  const double sigma = grid.r_max / 10.0;
  RadialField n = sample_field(
      grid, [&](double r) { return std::exp(-0.5 * r * r / (sigma * sigma)); });
  rescale_to_mass(n, mass);
  return n;
}

RadialField initial_density(const RadialGrid& grid, double mass,
                            const SCFConfig& config) {
  if (!config.seed_density) return gaussian_seed(grid, mass);
  if (!(config.seed_density->grid == grid)) {
    throw GridMismatch("seed density does not live on the solver grid");
  }
  RadialField n = *config.seed_density;
  rescale_to_mass(n, mass);
  return n;
}

void require_aligned(const Spectrum& spectrum, const OccupationSet& occ) {
  if (spectrum.entries.size() != occ.levels.size()) {
    throw InvalidParameter("occupations are not aligned with the spectrum");
  }
  for (size_t j = 0; j < occ.levels.size(); ++j) {
    if (spectrum.entries[j].l != occ.levels[j].l ||
        spectrum.entries[j].n != occ.levels[j].n) {
      throw InvalidParameter("occupations are not aligned with the spectrum");
    }
  }
}

// Free energy of a trial dilation of `state`: every occupied orbital is
// resampled as u(r) -> sqrt(s) u(s r) (cubic interpolation, renormalized),
// occupations are kept, so the trial carries the same mass and entropy.
struct DilationTrial {
  double total = 0.0;
  RadialField density;
};

DilationTrial dilate_state(const MixedState& state, double s) {
  const RadialGrid& grid = state.spectrum.grid;
  Spectrum scaled = state.spectrum;
  const double root = std::sqrt(s);
  for (size_t j = 0; j < scaled.entries.size(); ++j) {
    if (state.occupations.levels[j].lambda <= 0.0) continue;
    std::vector<double>& u = scaled.entries[j].u;
    const CubicInterpolant interp(grid.h, grid.h, u);
    std::vector<double> v(u.size());
    for (int i = 0; i < grid.n_points; ++i) {
      v[static_cast<size_t>(i)] = root * interp(s * grid.r(i));
    }
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    norm2 *= grid.h;
    if (!(norm2 > 0.0)) {
      throw ConvergenceFailure("dilation annihilated an occupied orbital");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    u = std::move(v);
  }

  DilationTrial trial;
  trial.density = density_from_state(scaled, state.occupations);
  const Potential v_trial = potential_from_density(trial.density);
  double e_kin = 0.0;
  double entropy_term = 0.0;
  for (size_t j = 0; j < scaled.entries.size(); ++j) {
    const LevelOccupation& lvl = state.occupations.levels[j];
    const double weight = lvl.lambda * lvl.degeneracy;
    if (weight <= 0.0) continue;
    e_kin += weight * kinetic_energy_of_entry(scaled.entries[j], grid);
    if (state.entropy) {
      entropy_term += lvl.degeneracy * state.entropy->beta(lvl.lambda);
    }
  }
  trial.total = e_kin - potential_energy(trial.density, v_trial) +
                state.temperature * entropy_term;
  return trial;
}

}  // namespace

RadialField density_from_state(const Spectrum& spectrum,
                               const OccupationSet& occupations) {
  require_aligned(spectrum, occupations);
  RadialField n = make_field(spectrum.grid);
  const double four_pi = 4.0 * std::numbers::pi;
  for (size_t j = 0; j < occupations.levels.size(); ++j) {
    const LevelOccupation& lvl = occupations.levels[j];
    const double weight = lvl.lambda * lvl.degeneracy;
    if (weight <= 0.0) continue;
    const std::vector<double>& u = spectrum.entries[j].u;
    for (int i = 0; i < spectrum.grid.n_points; ++i) {
      const double r = spectrum.grid.r(i);
      const size_t k = static_cast<size_t>(i);
      n.values[k] += weight * u[k] * u[k] / (four_pi * r * r);
    }
  }
  return n;
}

FreeEnergyBreakdown free_energy(const MixedState& state) {
  require_aligned(state.spectrum, state.occupations);
  FreeEnergyBreakdown bd;
  double multiplier_sum = 0.0;
  for (size_t j = 0; j < state.occupations.levels.size(); ++j) {
    const LevelOccupation& lvl = state.occupations.levels[j];
    const double weight = lvl.lambda * lvl.degeneracy;
    if (weight <= 0.0) continue;
    bd.e_kin += weight * kinetic_energy_of_entry(state.spectrum.entries[j],
                                                 state.spectrum.grid);
    if (state.entropy) {
      bd.entropy_term += lvl.degeneracy * state.entropy->beta(lvl.lambda);
      multiplier_sum +=
          weight * (lvl.eigenvalue +
                    state.temperature * state.entropy->beta_prime(lvl.lambda));
    } else {
      multiplier_sum += weight * lvl.eigenvalue;
    }
  }
  bd.e_pot = potential_energy(state.density, state.potential);
  bd.total = bd.e_kin - bd.e_pot + state.temperature * bd.entropy_term;
  bd.virial_ratio = bd.e_kin > 0.0 ? 2.0 * bd.e_pot / bd.e_kin : 0.0;
  bd.multiplier_residual = std::abs(state.mu * state.mass - multiplier_sum);
  return bd;
}

MixedState scf_step(const MixedState& state, const SCFConfig& config) {
  if (config.mixing < 0.0 || config.mixing > 1.0) {
    throw InvalidParameter("mixing must lie in [0, 1] for a single sweep");
  }
  if (!(state.temperature > 0.0)) {
    throw InvalidTemperature("scf_step requires T > 0");
  }
  if (!state.entropy) {
    throw InvalidParameter("state carries no entropy model");
  }
  Spectrum spectrum =
      full_spectrum(state.potential, config.l_max, config.k_per_channel);
  OccupationSet occ = solve_chemical_potential(spectrum, state.mass,
                                               state.temperature, *state.entropy);
  const RadialField fresh = density_from_state(spectrum, occ);
  RadialField mixed = state.density;
  const double a = config.mixing;
  for (size_t i = 0; i < mixed.values.size(); ++i) {
    mixed.values[i] = (1.0 - a) * mixed.values[i] + a * fresh.values[i];
  }
  rescale_to_mass(mixed, state.mass);
  Potential v = potential_from_density(mixed);
  const double mu = occ.mu;
  return MixedState{std::move(spectrum), std::move(occ),  std::move(mixed),
                    std::move(v),        mu,              state.temperature,
                    state.mass,          state.entropy};
}

SolveResult scf_solve(double mass, double temperature, const EntropySpec& spec,
                      const SCFConfig& config) {
  check_config(config);
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  if (!(temperature > 0.0)) {
    throw InvalidTemperature("scf_solve requires T > 0; use zero_temperature_solve");
  }
  const RadialGrid grid = make_grid(config.r_max, config.n_points);

  MixedState work;
  work.spectrum.grid = grid;
  work.density = initial_density(grid, mass, config);
  work.potential = potential_from_density(work.density);
  work.temperature = temperature;
  work.mass = mass;
  work.entropy = spec;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double alpha = config.mixing;
  double f_prev = nan;
  int increases = 0;
  int calm = 0;
  int restarts = 0;
  bool converged = false;

  std::optional<MixedState> last;
  FreeEnergyBreakdown bd;
  std::vector<double> history;
  history.reserve(static_cast<size_t>(config.max_iterations));
  int iterations = 0;

  while (iterations < config.max_iterations) {
    ++iterations;
    SCFConfig step_config = config;
    step_config.mixing = alpha;
    step_config.seed_density.reset();
    MixedState next = scf_step(work, step_config);

    RadialField n_out = density_from_state(next.spectrum, next.occupations);
    const double residual = field_distance_l1(n_out, work.density);
    Potential v_out = potential_from_density(n_out);
    const double mu = next.occupations.mu;
    MixedState candidate{next.spectrum, next.occupations, std::move(n_out),
                         std::move(v_out), mu, temperature, mass, spec};
    const FreeEnergyBreakdown cand = free_energy(candidate);
    history.push_back(cand.total);

    const bool have_prev = std::isfinite(f_prev);
    const double df = have_prev ? std::abs(cand.total - f_prev)
                                : std::numeric_limits<double>::infinity();
    const double tol_e = config.tol_energy * std::abs(cand.total) + kEnergyFloor;
    // Only a material increase counts against the mixing weight; rounding
    // jitter in the converged tail must not collapse alpha to the floor.
    if (have_prev && cand.total > f_prev + tol_e) {
      calm = 0;
      if (++increases >= 2) {
        alpha = std::max(0.5 * alpha, 0.05);
        increases = 0;
      }
    } else {
      increases = 0;
      if (++calm >= 20) {
        alpha = std::min(1.25 * alpha, config.mixing);
        calm = 0;
      }
    }

    last = std::move(candidate);
    bd = cand;

    if (residual <= config.tol_density * mass && df <= tol_e) {
      // Fixed point reached.  The dilation trial certifies it: at a
      // minimizer the virial identity makes s = 1 stationary, so a
      // material drop means the iteration stalled short of the minimum.
      bool restarted = false;
      if (bd.e_kin > 0.0 && restarts < 3) {
        const double s = std::clamp(bd.e_pot / (2.0 * bd.e_kin), 0.5, 2.0);
        DilationTrial trial = dilate_state(*last, s);
        if (trial.total < bd.total - tol_e) {
          ++restarts;
          rescale_to_mass(trial.density, mass);
          work.density = std::move(trial.density);
          work.potential = potential_from_density(work.density);
          f_prev = nan;
          increases = 0;
          calm = 0;
          restarted = true;
        }
      }
      if (!restarted) {
        converged = true;
        break;
      }
      continue;
    }

    f_prev = cand.total;
    work = std::move(next);
  }

  SolveResult result;
  result.state = std::move(*last);
  result.breakdown = bd;
  result.iterations = iterations;
  result.converged = converged;
  result.rank = rank_of(result.state.occupations, 1e-10 * mass);
  result.tail_mass_half = tail_mass(result.state, 0.5 * grid.r_max);
  result.truncation_leak = tail_mass(result.state, 0.9 * grid.r_max) / mass;
  result.f_history = std::move(history);
  return result;
}

SolveResult zero_temperature_solve(double mass, const SCFConfig& config) {
  check_config(config);
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  const RadialGrid grid = make_grid(config.r_max, config.n_points);
  const double four_pi = 4.0 * std::numbers::pi;

  RadialField n = initial_density(grid, mass, config);
  Potential v = potential_from_density(n);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iterations = 0;
  int restarts = 0;
  std::vector<double> history;
  history.reserve(static_cast<size_t>(config.max_iterations));

  // Inner rank-1 loop: ground level of the current potential carries the
  // whole mass.  On convergence n and v hold the pure output pair.
  const auto run_inner = [&]() {
    double alpha = config.mixing;
    double f_prev = nan;
    int increases = 0;
    int calm = 0;
    while (iterations < config.max_iterations) {
      ++iterations;
      const std::vector<EigenPair> pairs = channel_eigensolve(v, 0, 1);
      const std::vector<double>& u = pairs.front().u;
      RadialField n_out = make_field(grid);
      for (int i = 0; i < grid.n_points; ++i) {
        const double r = grid.r(i);
        const size_t k = static_cast<size_t>(i);
        n_out.values[k] = mass * u[k] * u[k] / (four_pi * r * r);
      }
      const double residual = field_distance_l1(n_out, n);
      Potential v_out = potential_from_density(n_out);
      const double e_kin = mass * kinetic_energy_of_u(u, 0, grid);
      const double energy = e_kin - potential_energy(n_out, v_out);
      history.push_back(energy);

      const bool have_prev = std::isfinite(f_prev);
      const double df = have_prev ? std::abs(energy - f_prev)
                                  : std::numeric_limits<double>::infinity();
      const double tol_e = config.tol_energy * std::abs(energy) + kEnergyFloor;
      if (have_prev && energy > f_prev + tol_e) {
        calm = 0;
        if (++increases >= 2) {
          alpha = std::max(0.5 * alpha, 0.05);
          increases = 0;
        }
      } else {
        increases = 0;
        if (++calm >= 20) {
          alpha = std::min(1.25 * alpha, config.mixing);
          calm = 0;
        }
      }

      if (residual <= config.tol_density * mass && df <= tol_e) {
        n = std::move(n_out);
        v = std::move(v_out);
        return true;
      }
      f_prev = energy;
      for (size_t i = 0; i < n.values.size(); ++i) {
        n.values[i] = (1.0 - alpha) * n.values[i] + alpha * n_out.values[i];
      }
      rescale_to_mass(n, mass);
      v = potential_from_density(n);
    }
    return false;
  };

  std::optional<MixedState> state;
  FreeEnergyBreakdown bd;
  while (true) {
    converged = run_inner();
    if (!converged) break;

    // Re-expand over all channels so the subcritical gap mu_1 - mu_0 is
    // visible to callers; the ground entry then carries the mass.
    Spectrum spectrum = full_spectrum(v, config.l_max, config.k_per_channel);
    if (spectrum.entries.empty()) {
      throw EmptySpectrum("converged potential binds no level");
    }
    OccupationSet occ;
    occ.temperature = 0.0;
    occ.mu = spectrum.entries.front().eigenvalue;
    occ.mass_realized = mass;
    occ.levels.reserve(spectrum.entries.size());
    for (size_t j = 0; j < spectrum.entries.size(); ++j) {
      const SpectrumEntry& entry = spectrum.entries[j];
      occ.levels.push_back(LevelOccupation{entry.l, entry.n, entry.eigenvalue,
                                           entry.degeneracy,
                                           j == 0 ? mass : 0.0});
    }
    RadialField n_final = density_from_state(spectrum, occ);
    Potential v_final = potential_from_density(n_final);
    const double mu = occ.mu;
    state = MixedState{std::move(spectrum), std::move(occ), std::move(n_final),
                       std::move(v_final), mu, 0.0, mass, std::nullopt};
    bd = free_energy(*state);

    if (bd.e_kin <= 0.0 || restarts >= 3) break;
    const double s = std::clamp(bd.e_pot / (2.0 * bd.e_kin), 0.5, 2.0);
    DilationTrial trial = dilate_state(*state, s);
    const double tol_e = config.tol_energy * std::abs(bd.total) + kEnergyFloor;
    if (trial.total >= bd.total - tol_e) break;
    ++restarts;
    rescale_to_mass(trial.density, mass);
    n = std::move(trial.density);
    v = potential_from_density(n);
  }

  if (!state) {
    // Never converged: expose the last iterate as an unconverged rank-1
    // state so callers can inspect it.
    const std::vector<EigenPair> pairs = channel_eigensolve(v, 0, 1);
    Spectrum spectrum;
    spectrum.grid = grid;
    spectrum.entries.push_back(
        SpectrumEntry{0, 0, pairs.front().eigenvalue, 1, pairs.front().u});
    OccupationSet occ;
    occ.temperature = 0.0;
    occ.mu = pairs.front().eigenvalue;
    occ.mass_realized = mass;
    occ.levels.push_back(
        LevelOccupation{0, 0, pairs.front().eigenvalue, 1, mass});
    RadialField n_final = density_from_state(spectrum, occ);
    Potential v_final = potential_from_density(n_final);
    const double mu = occ.mu;
    state = MixedState{std::move(spectrum), std::move(occ), std::move(n_final),
                       std::move(v_final), mu, 0.0, mass, std::nullopt};
    bd = free_energy(*state);
  }

  SolveResult result;
  result.state = std::move(*state);
  result.breakdown = bd;
  result.iterations = iterations;
  result.converged = converged;
  result.rank = rank_of(result.state.occupations, 1e-10 * mass);
  result.tail_mass_half = tail_mass(result.state, 0.5 * grid.r_max);
  result.truncation_leak = tail_mass(result.state, 0.9 * grid.r_max) / mass;
  result.f_history = std::move(history);
  return result;
}

double tail_mass(const MixedState& state, double radius) {
  if (radius < 0.0) throw InvalidParameter("tail radius must be nonnegative");
  const RadialGrid& grid = state.density.grid;
  if (radius >= grid.r_max) return 0.0;
  const double four_pi = 4.0 * std::numbers::pi;
  // First node at or beyond the radius; r(i) = (i + 1) h.
  int i0 = static_cast<int>(std::ceil(radius / grid.h - 1.0 - 1e-12));
  i0 = std::max(i0, 0);
  double sum = 0.0;
  for (int i = i0; i < grid.n_points; ++i) {
    const double r = grid.r(i);
    const double f = four_pi * r * r * state.density.values[static_cast<size_t>(i)];
    sum += (i == i0 ? 0.5 : 1.0) * f;
  }
  return grid.h * sum;
}

double minimality_probe(const MixedState& state, int trials,
                        unsigned rng_seed) {
  if (trials < 1) throw InvalidParameter("trials must be at least 1");
  if (state.occupations.levels.empty()) {
    throw EmptySpectrum("state carries no levels to mix");
  }
  require_aligned(state.spectrum, state.occupations);
  const double f0 = free_energy(state).total;
  const size_t count = state.occupations.levels.size();

  std::vector<double> kinetic(count);
  for (size_t j = 0; j < count; ++j) {
    kinetic[j] = kinetic_energy_of_entry(state.spectrum.entries[j],
                                         state.spectrum.grid);
  }

  std::mt19937 rng(rng_seed);
  std::exponential_distribution<double> draw(1.0);
  constexpr double kSteps[] = {1e-3, 1e-2};
  double worst = std::numeric_limits<double>::infinity();

  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> c(count);
    double total_weight = 0.0;
    for (size_t j = 0; j < count; ++j) {
      c[j] = draw(rng);
      total_weight += c[j] * state.occupations.levels[j].degeneracy;
    }
    for (double& x : c) x *= state.mass / total_weight;

    for (double t : kSteps) {
      OccupationSet mixed = state.occupations;
      double e_kin = 0.0;
      double entropy_term = 0.0;
      double realized = 0.0;
      for (size_t j = 0; j < count; ++j) {
        LevelOccupation& lvl = mixed.levels[j];
        lvl.lambda = (1.0 - t) * lvl.lambda + t * c[j];
        realized += lvl.lambda * lvl.degeneracy;
        e_kin += lvl.lambda * lvl.degeneracy * kinetic[j];
        if (state.entropy) {
          entropy_term += lvl.degeneracy * state.entropy->beta(lvl.lambda);
        }
      }
      mixed.mass_realized = realized;
      const RadialField n_mix = density_from_state(state.spectrum, mixed);
      const Potential v_mix = potential_from_density(n_mix);
      const double f_mix = e_kin - potential_energy(n_mix, v_mix) +
                           state.temperature * entropy_term;
      worst = std::min(worst, f_mix - f0);
    }
  }
  return worst;
}

}  // namespace hartree
