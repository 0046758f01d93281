// Microbenchmarks for the kernels an SCF sweep is made of, in increasing
// cost: quadrature, Poisson solve, channel eigensolve, occupation solve,
// one full sweep. Grid sizes bracket the production range.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hartree/entropy.hpp"
#include "hartree/grid.hpp"
#include "hartree/occupations.hpp"
#include "hartree/poisson.hpp"
#include "hartree/scf.hpp"
#include "hartree/spectral.hpp"

namespace {

using namespace hartree;

// Normalized Gaussian shell; a stand-in for a converged thermal density.
RadialField model_density(const RadialGrid& grid) {
  RadialField n = sample_field(grid, [](double r) {
    const double z = (r - 8.0) / 3.0;
    return std::exp(-0.5 * z * z);
  });
  const double mass = integrate_volume(n);
  for (double& v : n.values) v /= mass;
  return n;
}

Potential model_potential(const RadialGrid& grid) {
  return potential_from_density(model_density(grid));
}

void BM_IntegrateVolume(benchmark::State& state) {
  const RadialGrid grid = make_grid(100.0, static_cast<int>(state.range(0)));
  const RadialField n = model_density(grid);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_volume(n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IntegrateVolume)->Arg(1000)->Arg(5000)->Arg(20000)->Complexity();

void BM_PoissonSolve(benchmark::State& state) {
  const RadialGrid grid = make_grid(100.0, static_cast<int>(state.range(0)));
  const RadialField n = model_density(grid);
  for (auto _ : state) benchmark::DoNotOptimize(potential_from_density(n));
}
BENCHMARK(BM_PoissonSolve)->Arg(1000)->Arg(5000)->Arg(20000);

void BM_ChannelEigensolve(benchmark::State& state) {
  const RadialGrid grid = make_grid(100.0, static_cast<int>(state.range(0)));
  const Potential v = model_potential(grid);
  for (auto _ : state) benchmark::DoNotOptimize(channel_eigensolve(v, 0, 4));
}
BENCHMARK(BM_ChannelEigensolve)->Arg(1000)->Arg(2000)->Arg(5000);

void BM_MassAtMu(benchmark::State& state) {
  const RadialGrid grid = make_grid(100.0, 2000);
  const Potential v = model_potential(grid);
  const Spectrum spectrum = full_spectrum(v, 3, 3);
  const EntropySpec spec = EntropySpec::power_law(2.0);
  const double mu = 0.5 * spectrum.entries.front().eigenvalue;
  for (auto _ : state)
    benchmark::DoNotOptimize(mass_at_mu(spectrum, mu, 0.01, spec));
}
BENCHMARK(BM_MassAtMu);

void BM_SolveChemicalPotential(benchmark::State& state) {
  const RadialGrid grid = make_grid(100.0, 2000);
  const Potential v = model_potential(grid);
  const Spectrum spectrum = full_spectrum(v, 3, 3);
  const EntropySpec spec = EntropySpec::power_law(2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_chemical_potential(spectrum, 1.0, 0.01, spec));
}
BENCHMARK(BM_SolveChemicalPotential);

void BM_ScfStep(benchmark::State& state) {
  SCFConfig config;
  config.r_max = 60.0;
  config.n_points = static_cast<int>(state.range(0));
  config.l_max = 2;
  config.k_per_channel = 2;

  MixedState current;
  current.mass = 1.0;
  current.temperature = 0.01;
  current.entropy = EntropySpec::power_law(2.0);
  current.density = model_density(make_grid(config.r_max, config.n_points));
  current.potential = potential_from_density(current.density);

  for (auto _ : state) benchmark::DoNotOptimize(scf_step(current, config));
}
BENCHMARK(BM_ScfStep)->Arg(800)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
