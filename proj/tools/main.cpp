// thermal-hartree: free-energy minimizers of the gravitational Hartree
// model under a mass constraint, plus the phase structure they trace out
// (critical temperature, maximal temperature).
//
// Exit codes: 0 success (a find-tstar run that reports no root is a
// success), 2 configuration problems, 3 solver non-convergence or a failed
// verification, 4 mass not attainable on the truncated basis, 1 anything
// else.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hartree/config.hpp"
#include "hartree/errors.hpp"
#include "hartree/grid.hpp"
#include "hartree/io.hpp"
#include "hartree/oracle.hpp"
#include "hartree/phase_diagram.hpp"
#include "hartree/scf.hpp"

namespace {

using namespace hartree;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Every option writes into this struct, but a field only overrides the
// config file (or the defaults) when the parsed subcommand actually saw
// the flag.
struct Flags {
  std::string config_path;
  double mass = 0.0;
  double temperature = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
  std::string entropy;
  double r_max = 0.0;
  int n_points = 0;
  int l_max = 0;
  int k_per_channel = 0;
  double mixing = 0.0;
  int max_iterations = 0;
  double tol_density = 0.0;
  double tol_energy = 0.0;
  double ceiling_factor = 0.0;
  int parallel = 0;
  std::string out;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path,
                  "key = value file; flags override its fields");
  sub->add_option("--mass", f.mass, "total mass M > 0");
  sub->add_option("--entropy", f.entropy, "power:<p> or custom:<path>");
  sub->add_option("--r-max", f.r_max, "domain radius");
  sub->add_option("--n-points", f.n_points, "radial grid points");
  sub->add_option("--l-max", f.l_max, "largest angular momentum channel");
  sub->add_option("--k-per-channel", f.k_per_channel,
                  "bound levels kept per channel");
  sub->add_option("--mixing", f.mixing,
                  "initial linear-mixing weight in (0, 1]");
  sub->add_option("--max-iterations", f.max_iterations, "SCF sweep budget");
  sub->add_option("--tol-density", f.tol_density,
                  "L1 density tolerance per unit mass");
  sub->add_option("--tol-energy", f.tol_energy,
                  "free-energy step tolerance per unit |F|");
  sub->add_option("--out", f.out, "output path; stdout when omitted");
}

RunConfig assemble(const CLI::App* sub, const Flags& f, Command command) {
  auto passed = [sub](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  RunConfig cfg;
  if (passed("--config")) cfg = parse_config_unchecked(read_file(f.config_path));
  cfg.command = command;
  if (passed("--mass")) cfg.mass = f.mass;
  if (passed("--temperature")) cfg.temperature = f.temperature;
  if (passed("--t-min")) cfg.t_min = f.t_min;
  if (passed("--t-max")) cfg.t_max = f.t_max;
  if (passed("--points")) cfg.points = f.points;
  if (passed("--entropy")) cfg.entropy = f.entropy;
  if (passed("--r-max")) cfg.r_max = f.r_max;
  if (passed("--n-points")) cfg.n_points = f.n_points;
  if (passed("--l-max")) cfg.l_max = f.l_max;
  if (passed("--k-per-channel")) cfg.k_per_channel = f.k_per_channel;
  if (passed("--mixing")) cfg.mixing = f.mixing;
  if (passed("--max-iterations")) cfg.max_iterations = f.max_iterations;
  if (passed("--tol-density")) cfg.tol_density = f.tol_density;
  if (passed("--tol-energy")) cfg.tol_energy = f.tol_energy;
  if (passed("--ceiling-factor")) cfg.ceiling_factor = f.ceiling_factor;
  if (passed("--parallel")) cfg.parallel = f.parallel;
  if (passed("--out")) cfg.out = f.out;
  validate_config(cfg);
  return cfg;
}

int run_solve(const RunConfig& cfg) {
  const EntropySpec spec = resolve_entropy(cfg.entropy);
  const SCFConfig scf = scf_config_from(cfg);
  const SolveResult result = cfg.command == Command::solve_zero
                                 ? zero_temperature_solve(cfg.mass, scf)
                                 : scf_solve(cfg.mass, cfg.temperature, spec, scf);
  if (cfg.out.empty()) {
    std::cout << solve_json(result, cfg);
  } else {
    write_solve_json(result, cfg, cfg.out);
  }
  if (!result.converged) {
    std::cerr << "error: no convergence within " << result.iterations
              << " sweeps\n";
    return 3;
  }
  return 0;
}

int run_scan(const RunConfig& cfg) {
  const EntropySpec spec = resolve_entropy(cfg.entropy);
  const SCFConfig scf = scf_config_from(cfg);
  std::vector<double> temperatures;
  temperatures.reserve(static_cast<size_t>(cfg.points));
  if (cfg.points == 1) {
    temperatures.push_back(cfg.t_min);
  } else {
    const double spacing = (cfg.t_max - cfg.t_min) / (cfg.points - 1);
    for (int k = 0; k < cfg.points; ++k)
      temperatures.push_back(cfg.t_min + spacing * k);
  }
  const ScanMode mode =
      cfg.parallel > 1 ? ScanMode::independent : ScanMode::warm_started;
  ScanResult scan =
      temperature_scan(cfg.mass, spec, temperatures, scf, mode, cfg.parallel);
  try {
    const SolveResult zero = zero_temperature_solve(cfg.mass, scf);
    scan.t_c_formula = critical_temperature_formula(cfg.mass, spec, zero);
  } catch (const Error&) {
    // The scan stands on its own; the formula annotation is best effort.
  }
  if (cfg.out.empty()) {
    std::cout << scan_csv(scan);
  } else {
    write_scan_csv(scan, cfg.out);
  }
  const bool any_converged =
      std::any_of(scan.points.begin(), scan.points.end(),
                  [](const ScanPoint& p) { return p.converged; });
  if (!any_converged) {
    std::cerr << "error: no scan point converged\n";
    return 3;
  }
  return 0;
}

int run_find_tc(const RunConfig& cfg) {
  const EntropySpec spec = resolve_entropy(cfg.entropy);
  const CriticalTemperatureResult result =
      find_critical_temperature(cfg.mass, spec, scf_config_from(cfg));
  std::cout << "t_c_scan = " << num(result.t_c_scan) << '\n'
            << "t_c_formula = " << num(result.t_c_formula) << '\n'
            << "relative_gap = " << num(result.relative_gap) << '\n'
            << "probes = " << result.trace.size() << '\n';
  if (!cfg.out.empty()) {
    ScanResult trace;
    trace.points = result.trace;
    trace.t_c_scan = result.t_c_scan;
    trace.t_c_formula = result.t_c_formula;
    write_scan_csv(trace, cfg.out);
  }
  return 0;
}

int run_find_tstar(const RunConfig& cfg) {
  const EntropySpec spec = resolve_entropy(cfg.entropy);
  const TStarResult result = find_max_temperature(
      cfg.mass, spec, scf_config_from(cfg), cfg.ceiling_factor);
  std::cout << "t_c_formula = " << num(result.t_c_formula) << '\n'
            << "lower_bound = " << num(result.lower_bound) << '\n'
            << "ceiling = " << num(result.ceiling) << '\n';
  if (result.found()) {
    std::cout << "t_star = " << num(*result.t_star) << '\n';
  } else {
    std::cout << "t_star = none\n"
              << "note = " << result.note << '\n';
  }
  if (!cfg.out.empty()) {
    ScanResult trace;
    trace.points = result.trace;
    trace.t_c_formula = result.t_c_formula;
    trace.t_star = result.t_star;
    write_scan_csv(trace, cfg.out);
  }
  return 0;
}

// A fresh solve followed by the identity checks that hold at any minimizer,
// each printed as one line. The zero-temperature path cross-checks against
// the independent rank-1 descent; the thermal path probes local minimality
// along occupation mixtures instead.
int run_verify(const RunConfig& cfg) {
  const EntropySpec spec = resolve_entropy(cfg.entropy);
  const SCFConfig scf = scf_config_from(cfg);
  bool all_ok = true;
  auto report = [&all_ok](bool ok, const std::string& name,
                          const std::string& detail) {
    all_ok = all_ok && ok;
    std::cout << (ok ? "ok   " : "FAIL ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << '\n';
  };

  const ValidationReport assumptions =
      validate_assumptions(spec, std::max(1.0, cfg.mass));
  std::string detail = "p_sup = " + num(assumptions.p_sup);
  for (const std::string& message : assumptions.messages)
    detail += "; " + message;
  report(assumptions.all(), "entropy assumptions", detail);

  const SolveResult result =
      cfg.temperature > 0.0 ? scf_solve(cfg.mass, cfg.temperature, spec, scf)
                            : zero_temperature_solve(cfg.mass, scf);
  report(result.converged, "solver converged",
         std::to_string(result.iterations) + " sweeps");
  if (!result.converged) return 3;

  const double f = result.breakdown.total;
  const double virial_err = std::abs(result.breakdown.virial_ratio - 4.0);
  report(virial_err <= 5e-3, "virial identity",
         "|2 e_pot / e_kin - 4| = " + num(virial_err));

  const double mu_scale = std::max(std::abs(result.state.mu) * cfg.mass, 1e-12);
  report(result.breakdown.multiplier_residual <= 1e-6 * mu_scale,
         "multiplier identity",
         "residual / |mu M| = " +
             num(result.breakdown.multiplier_residual / mu_scale));

  report(result.tail_mass_half <= 1e-6 * cfg.mass, "confinement",
         "mass beyond r_max / 2 = " + num(result.tail_mass_half));

  if (cfg.temperature > 0.0) {
    const double probe = minimality_probe(result.state);
    report(probe >= -1e-8 * std::abs(f), "local minimality",
           "worst occupation direction = " + num(probe));
  } else {
    const oracle::Rank1Result reference =
        oracle::rank1_descent(cfg.mass, make_grid(cfg.r_max, cfg.n_points));
    const double gap = std::abs(f - reference.energy);
    report(reference.converged && gap <= 1e-3 * std::abs(reference.energy),
           "oracle cross-check",
           "|F - F_ref| / |F_ref| = " + num(gap / std::abs(reference.energy)));
    // M d/dM of the cubic mass scaling of the ground energy: mu = 3 F / M.
    const double mu_gap = std::abs(result.state.mu - 3.0 * f / cfg.mass);
    report(mu_gap <= 1e-3 * std::abs(result.state.mu),
           "chemical potential scaling",
           "|mu - 3 F / M| / |mu| = " + num(mu_gap / std::abs(result.state.mu)));
  }
  return all_ok ? 0 : 3;
}

int run_oracle(const RunConfig& cfg) {
  const oracle::ReferenceValues values =
      oracle::reference_values(make_grid(cfg.r_max, cfg.n_points));
  if (cfg.out.empty()) {
    std::cout << "i_10 = " << num(values.i_10) << '\n'
              << "mu0_0 = " << num(values.mu0_0) << '\n'
              << "mu0_1 = " << num(values.mu0_1) << '\n'
              << "r_max = " << num(values.r_max) << '\n'
              << "n_points = " << values.n_points << '\n';
  } else {
    oracle::write_reference(values, cfg.out);
  }
  return 0;
}

int fail(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "finite-temperature ground states of the gravitational Hartree model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "thermal-hartree 1.0.0");

  Flags f;
  CLI::App* solve =
      app.add_subcommand("solve", "thermal minimizer at fixed (M, T)");
  solve->add_option("--temperature", f.temperature, "temperature T > 0");
  CLI::App* solve_zero =
      app.add_subcommand("solve-zero", "ground state at T = 0");
  CLI::App* scan = app.add_subcommand(
      "scan", "free energy along a uniform temperature grid");
  scan->add_option("--t-min", f.t_min, "first temperature, > 0");
  scan->add_option("--t-max", f.t_max, "last temperature");
  scan->add_option("--points", f.points, "number of scan points");
  scan->add_option("--parallel", f.parallel,
                   "worker threads; > 1 forces cold starts");
  CLI::App* find_tc = app.add_subcommand(
      "find-tc", "critical temperature, formula and bisection");
  CLI::App* find_tstar = app.add_subcommand(
      "find-tstar", "maximal temperature of negative free energy");
  find_tstar->add_option("--ceiling-factor", f.ceiling_factor,
                         "probe ceiling in units of T_c");
  CLI::App* verify =
      app.add_subcommand("verify", "identity checks on a fresh solve");
  verify->add_option("--temperature", f.temperature, "temperature T >= 0");
  CLI::App* orc = app.add_subcommand(
      "oracle", "independent reference values for the unit-mass ground state");
  for (CLI::App* sub : {solve, solve_zero, scan, find_tc, find_tstar, verify, orc})
    add_common(sub, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 2;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    Command command = Command::solve;
    if (sub == solve_zero) command = Command::solve_zero;
    else if (sub == scan) command = Command::scan;
    else if (sub == find_tc) command = Command::find_tc;
    else if (sub == find_tstar) command = Command::find_tstar;
    else if (sub == verify) command = Command::verify;
    else if (sub == orc) command = Command::oracle;

    const RunConfig cfg = assemble(sub, f, command);
    switch (cfg.command) {
      case Command::solve:
      case Command::solve_zero:
        return run_solve(cfg);
      case Command::scan:
        return run_scan(cfg);
      case Command::find_tc:
        return run_find_tc(cfg);
      case Command::find_tstar:
        return run_find_tstar(cfg);
      case Command::verify:
        return run_verify(cfg);
      case Command::oracle:
        return run_oracle(cfg);
    }
    return 1;
  } catch (const MassNotAttainable& e) {
    return fail(e, 4);
  } catch (const ConvergenceFailure& e) {
    return fail(e, 3);
  } catch (const Stagnation& e) {
    return fail(e, 3);
  } catch (const ParseError& e) {
    return fail(e, 2);
  } catch (const ValidationError& e) {
    return fail(e, 2);
  } catch (const InvalidParameter& e) {
    return fail(e, 2);
  } catch (const InvalidTemperature& e) {
    return fail(e, 2);
  } catch (const GridMismatch& e) {
    return fail(e, 2);
  } catch (const InvalidGrid& e) {
    return fail(e, 2);
  } catch (const std::exception& e) {
    return fail(e, 1);
  }
}
