#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hartree/config.hpp"
#include "hartree/errors.hpp"
#include "hartree/io.hpp"

using namespace hartree;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/hartree_test_" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

const SolveResult& small_ground() {
  static const SolveResult r = [] {
    SCFConfig c;
    c.r_max = 40.0;
    c.n_points = 800;
    c.l_max = 1;
    c.k_per_channel = 2;
    return zero_temperature_solve(1.0, c);
  }();
  return r;
}

}  // namespace

TEST_CASE("minimal config maps to solve defaults") {
  const RunConfig cfg =
      parse_config("mass = 1.0\ntemperature = 0.02\nentropy = power:2\n");
  CHECK(cfg.command == Command::solve);
  CHECK(cfg.mass == 1.0);
  CHECK(cfg.temperature == 0.02);
  CHECK(cfg.entropy == "power:2");
  CHECK(cfg.r_max == 100.0);
  CHECK(cfg.n_points == 5000);
  CHECK(cfg.parallel == 1);
}

TEST_CASE("comments, blank lines and spacing are tolerated") {
  const RunConfig cfg = parse_config(
      "# a run\n"
      "\n"
      "command = solve-zero\n"
      "  mass=2.5   # trailing comment\n"
      "\tr_max =\t80\n");
  CHECK(cfg.command == Command::solve_zero);
  CHECK(cfg.mass == 2.5);
  CHECK(cfg.r_max == 80.0);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_config("mass = 1\nnonsense line\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_config("mass = 1\n\nwidth = 3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 3") != std::string::npos);
    CHECK(what.find("width") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("mass = abc\ntemperature = 0.1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("n_points = 2.5\ntemperature = 0.1\n"),
                  ParseError);
}

TEST_CASE("validation names the offending field") {
  try {
    parse_config("mass = -1\ntemperature = 0.1\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("mass") != std::string::npos);
  }
  try {
    parse_config("temperature = 0.1\nentropy = power:1.0\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("entropy") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("temperature = 0.1\nentropy = linear\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("command = melt\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("temperature = 0\n"), ValidationError);
  CHECK_THROWS_AS(
      parse_config("command = scan\nt_min = 0.1\nt_max = 0.05\npoints = 4\n"),
      ValidationError);
  CHECK_THROWS_AS(parse_config("temperature = 1\nmixing = 0\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("temperature = 1\nseed = zeros\n"),
                  ValidationError);
}

TEST_CASE("serialization round trips exactly") {
  RunConfig cfg;
  cfg.command = Command::find_tstar;
  cfg.mass = 0.3;
  cfg.temperature = 0.1;
  cfg.t_min = 1e-3;
  cfg.t_max = 0.0271285;
  cfg.points = 17;
  cfg.entropy = "power:1.2";
  cfg.r_max = 123.456;
  cfg.n_points = 2048;
  cfg.l_max = 3;
  cfg.k_per_channel = 5;
  cfg.mixing = 0.65;
  cfg.max_iterations = 321;
  cfg.tol_density = 3e-9;
  cfg.tol_energy = 1.5e-11;
  cfg.ceiling_factor = 12.5;
  cfg.parallel = 4;
  cfg.out = "runs/out.csv";
  const RunConfig back = parse_config(serialize_config(cfg));
  CHECK(back == cfg);
  // Doubles that lack a short decimal form survive the trip bit-exactly.
  RunConfig awkward;
  awkward.temperature = 0.1;
  awkward.mass = 1.0 / 3.0;
  awkward.tol_density = 1e-8 * (1.0 + 1e-15);
  const RunConfig back2 = parse_config(serialize_config(awkward));
  CHECK(back2 == awkward);
}

TEST_CASE("entropy strings resolve to generators") {
  const EntropySpec p2 = resolve_entropy("power:2");
  CHECK(p2.is_power_law());
  CHECK(p2.exponent() == 2.0);

  const std::string path = write_temp(
      "entropy.txt", "# two terms\n0.5 2.0\n0.5 3.0  # cubic tail\n");
  const EntropySpec mix = resolve_entropy("custom:" + path);
  CHECK(!mix.is_power_law());
  CHECK(mix.beta(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mix.beta_prime(1.0) == doctest::Approx(0.5 * 2 + 0.5 * 3).epsilon(1e-14));

  CHECK_THROWS_AS(resolve_entropy("custom:/no/such/file"), ValidationError);
  const std::string bad = write_temp("entropy_bad.txt", "0.5 0.9\n");
  CHECK_THROWS_AS(resolve_entropy("custom:" + bad), ValidationError);
  const std::string empty = write_temp("entropy_empty.txt", "# nothing\n");
  CHECK_THROWS_AS(resolve_entropy("custom:" + empty), ValidationError);
}

TEST_CASE("scf configuration mapping") {
  RunConfig cfg;
  cfg.temperature = 0.1;
  cfg.r_max = 64.0;
  cfg.n_points = 1000;
  cfg.l_max = 2;
  cfg.k_per_channel = 3;
  cfg.mixing = 0.7;
  cfg.max_iterations = 42;
  cfg.tol_density = 2e-8;
  cfg.tol_energy = 2e-10;
  const SCFConfig sc = scf_config_from(cfg);
  CHECK(sc.r_max == 64.0);
  CHECK(sc.n_points == 1000);
  CHECK(sc.l_max == 2);
  CHECK(sc.k_per_channel == 3);
  CHECK(sc.mixing == 0.7);
  CHECK(sc.max_iterations == 42);
  CHECK(sc.tol_density == 2e-8);
  CHECK(sc.tol_energy == 2e-10);
  CHECK(!sc.seed_density.has_value());
}

TEST_CASE("solve json is well formed and faithful") {
  const SolveResult& r = small_ground();
  RunConfig cfg;
  cfg.command = Command::solve_zero;
  cfg.r_max = 40.0;
  cfg.n_points = 800;
  cfg.l_max = 1;
  cfg.k_per_channel = 2;
  const std::string payload = solve_json(r, cfg);
  const json doc = json::parse(payload);

  CHECK(doc.at("mass").get<double>() == 1.0);
  CHECK(doc.at("temperature").get<double>() == 0.0);
  CHECK(doc.at("entropy").get<std::string>() == "power:2");
  // 17 significant digits reproduce the binary value exactly.
  CHECK(doc.at("free_energy").get<double>() == r.breakdown.total);
  CHECK(doc.at("mu").get<double>() == r.state.mu);
  CHECK(doc.at("virial_ratio").get<double>() == r.breakdown.virial_ratio);
  CHECK(doc.at("rank").get<int>() == 1);
  CHECK(doc.at("converged").get<bool>());
  CHECK(doc.at("occupations").size() == 1);
  CHECK(doc.at("occupations")[0].at("l").get<int>() == 0);
  CHECK(doc.at("occupations")[0].at("lambda").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc.at("grid").at("n_points").get<int>() == 800);
  CHECK(doc.at("diagnostics").contains("tail_mass_half"));

  SUBCASE("identical runs serialize identically") {
    CHECK(solve_json(r, cfg) == payload);
  }

  SUBCASE("failed solves keep their diagnostics") {
    SolveResult broken = r;
    broken.converged = false;
    const json doc2 = json::parse(solve_json(broken, cfg));
    CHECK(!doc2.at("converged").get<bool>());
    CHECK(doc2.at("diagnostics").contains("multiplier_residual"));
  }
}

TEST_CASE("mixed solves report entropy below the pure ceiling") {
  SCFConfig c;
  c.r_max = 60.0;
  c.n_points = 1000;
  c.l_max = 1;
  c.k_per_channel = 2;
  const SolveResult z = zero_temperature_solve(1.0, c);
  const double tc =
      critical_temperature_formula(1.0, EntropySpec::power_law(2.0), z);
  const SolveResult r =
      scf_solve(1.0, 1.3 * tc, EntropySpec::power_law(2.0), c);
  REQUIRE(r.converged);
  RunConfig cfg;
  cfg.temperature = 1.3 * tc;
  const json doc = json::parse(solve_json(r, cfg));
  CHECK(doc.at("rank").get<int>() >= 2);
  // beta is convex with beta(0) = 0, so splitting mass across levels can
  // only lower tr beta(rho) below the pure-state value beta(M) = 1.
  CHECK(doc.at("entropy_term").get<double>() > 0.0);
  CHECK(doc.at("entropy_term").get<double>() <= 1.0 + 1e-12);
  CHECK(doc.at("occupations").size() >= 2);
}

TEST_CASE("scan csv layout") {
  ScanResult scan;
  for (int k = 0; k < 3; ++k) {
    ScanPoint pt;
    pt.temperature = 0.01 * (k + 1);
    pt.free_energy = -0.02 + 0.001 * k;
    pt.e_kin = 0.009;
    pt.e_pot = 0.018;
    pt.entropy_term = 1.0;
    pt.mu = -0.08;
    pt.rank = k == 2 ? 4 : 1;
    pt.lambda2 = k == 2 ? 0.05 : 0.0;
    pt.converged = k != 1;
    if (k == 1) pt.note = "did not converge";
    scan.points.push_back(pt);
  }
  scan.t_c_scan = 0.0169;
  scan.t_c_formula = 0.01689;

  const std::string text = scan_csv(scan);
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);

  REQUIRE(lines.size() == 7);
  CHECK(lines[0] ==
        "T,free_energy,e_kin,e_pot,entropy_term,mu,rank,lambda2,converged");
  CHECK(lines[1].find(",1") != std::string::npos);
  CHECK(lines[2].back() == '0');  // failed point still present
  CHECK(lines[3].find(",4,") != std::string::npos);
  CHECK(lines[4].rfind("# t_c_scan=", 0) == 0);
  CHECK(lines[5].rfind("# t_c_formula=", 0) == 0);
  CHECK(lines[6].rfind("# concavity_violations=", 0) == 0);

  CHECK_THROWS_AS(scan_csv(ScanResult{}), InvalidParameter);
}

TEST_CASE("files are written and surfacing io failures") {
  const SolveResult& r = small_ground();
  RunConfig cfg;
  cfg.r_max = 40.0;
  cfg.n_points = 800;
  const std::string path = "/tmp/hartree_test_solve.json";
  write_solve_json(r, cfg, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  json doc;
  in >> doc;
  CHECK(doc.at("rank").get<int>() == 1);
  std::remove(path.c_str());

  CHECK_THROWS_AS(write_solve_json(r, cfg, "/no/such/dir/x.json"), Error);
}
