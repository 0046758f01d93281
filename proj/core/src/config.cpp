#include "hartree/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "hartree/errors.hpp"

namespace hartree {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const size_t a = s.find_first_not_of(ws);
  if (a == std::string::npos) return {};
  const size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& detail) {
  throw ParseError("line " + std::to_string(line) + ": " + detail);
}

double to_double(const std::string& value, int line) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    parse_fail(line, "expected a number, got '" + value + "'");
  return out;
}

int to_int(const std::string& value, int line) {
  int out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    parse_fail(line, "expected an integer, got '" + value + "'");
  return out;
}

Command to_command(const std::string& value) {
  for (Command c : {Command::solve, Command::solve_zero, Command::scan,
                    Command::find_tc, Command::find_tstar, Command::verify,
                    Command::oracle}) {
    if (command_name(c) == value) return c;
  }
  throw ValidationError("command: unknown command '" + value + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_entropy_string(const std::string& entropy) {
  if (entropy.rfind("power:", 0) == 0) {
    const std::string ps = entropy.substr(6);
    double p = 0.0;
    const auto [ptr, ec] =
        std::from_chars(ps.data(), ps.data() + ps.size(), p);
    if (ec != std::errc{} || ptr != ps.data() + ps.size())
      throw ValidationError("entropy: malformed power law '" + entropy + "'");
    if (!(p > 1.0))
      throw ValidationError("entropy: power-law exponent must exceed 1");
    return;
  }
  if (entropy.rfind("custom:", 0) == 0) {
    if (entropy.size() == 7)
      throw ValidationError("entropy: custom spec needs a file path");
    return;
  }
  throw ValidationError("entropy: expected power:<p> or custom:<path>");
}

}  // namespace

std::string command_name(Command command) {
  switch (command) {
    case Command::solve: return "solve";
    case Command::solve_zero: return "solve-zero";
    case Command::scan: return "scan";
    case Command::find_tc: return "find-tc";
    case Command::find_tstar: return "find-tstar";
    case Command::verify: return "verify";
    case Command::oracle: return "oracle";
  }
  throw InvalidParameter("unreachable command value");
}

RunConfig parse_config_unchecked(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) parse_fail(line, "empty key");

    if (key == "command") cfg.command = to_command(value);
    else if (key == "mass") cfg.mass = to_double(value, line);
    else if (key == "temperature") cfg.temperature = to_double(value, line);
    else if (key == "t_min") cfg.t_min = to_double(value, line);
    else if (key == "t_max") cfg.t_max = to_double(value, line);
    else if (key == "points") cfg.points = to_int(value, line);
    else if (key == "entropy") cfg.entropy = value;
    else if (key == "r_max") cfg.r_max = to_double(value, line);
    else if (key == "n_points") cfg.n_points = to_int(value, line);
    else if (key == "l_max") cfg.l_max = to_int(value, line);
    else if (key == "k_per_channel") cfg.k_per_channel = to_int(value, line);
    else if (key == "mixing") cfg.mixing = to_double(value, line);
    else if (key == "max_iterations") cfg.max_iterations = to_int(value, line);
    else if (key == "tol_density") cfg.tol_density = to_double(value, line);
    else if (key == "tol_energy") cfg.tol_energy = to_double(value, line);
    else if (key == "ceiling_factor")
      cfg.ceiling_factor = to_double(value, line);
    else if (key == "parallel") cfg.parallel = to_int(value, line);
    else if (key == "out") cfg.out = value;
    else if (key == "seed") cfg.seed = value;
    else parse_fail(line, "unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = parse_config_unchecked(text);
  validate_config(cfg);
  return cfg;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "command = " << command_name(c.command) << '\n'
      << "mass = " << format_double(c.mass) << '\n'
      << "temperature = " << format_double(c.temperature) << '\n'
      << "t_min = " << format_double(c.t_min) << '\n'
      << "t_max = " << format_double(c.t_max) << '\n'
      << "points = " << c.points << '\n'
      << "entropy = " << c.entropy << '\n'
      << "r_max = " << format_double(c.r_max) << '\n'
      << "n_points = " << c.n_points << '\n'
      << "l_max = " << c.l_max << '\n'
      << "k_per_channel = " << c.k_per_channel << '\n'
      << "mixing = " << format_double(c.mixing) << '\n'
      << "max_iterations = " << c.max_iterations << '\n'
      << "tol_density = " << format_double(c.tol_density) << '\n'
      << "tol_energy = " << format_double(c.tol_energy) << '\n'
      << "ceiling_factor = " << format_double(c.ceiling_factor) << '\n'
      << "parallel = " << c.parallel << '\n'
      << "out = " << c.out << '\n'
      << "seed = " << c.seed << '\n';
  return out.str();
}

void validate_config(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
  };
  require(c.mass > 0.0, "mass must be positive");
  require(c.temperature >= 0.0, "temperature must be nonnegative");
  require(c.t_min >= 0.0, "t_min must be nonnegative");
  require(c.t_max >= 0.0, "t_max must be nonnegative");
  require(c.points >= 0, "points must be nonnegative");
  check_entropy_string(c.entropy);
  require(c.r_max > 0.0, "r_max must be positive");
  require(c.n_points >= 16, "n_points must be at least 16");
  require(c.l_max >= 0, "l_max must be nonnegative");
  require(c.k_per_channel >= 1, "k_per_channel must be positive");
  require(c.mixing > 0.0 && c.mixing <= 1.0, "mixing must lie in (0, 1]");
  require(c.max_iterations >= 1, "max_iterations must be positive");
  require(c.tol_density > 0.0, "tol_density must be positive");
  require(c.tol_energy > 0.0, "tol_energy must be positive");
  require(c.ceiling_factor > 0.0, "ceiling_factor must be positive");
  require(c.parallel >= 1, "parallel must be positive");
  require(c.seed == "gaussian", "seed must be 'gaussian'");

  switch (c.command) {
    case Command::solve:
      require(c.temperature > 0.0,
              "temperature must be positive for the solve command");
      break;
    case Command::scan:
      require(c.points >= 1, "points must be at least 1 for a scan");
      require(c.t_min > 0.0, "t_min must be positive for a scan");
      if (c.points >= 2)
        require(c.t_max > c.t_min,
                "t_max must exceed t_min for a multi-point scan");
      break;
    default:
      break;
  }
}

EntropySpec resolve_entropy(const std::string& entropy) {
  check_entropy_string(entropy);
  if (entropy.rfind("power:", 0) == 0) {
    return EntropySpec::power_law(std::stod(entropy.substr(6)));
  }
  const std::string path = entropy.substr(7);
  std::ifstream in(path);
  if (!in)
    throw ValidationError("entropy: cannot open custom file '" + path + "'");
  std::vector<std::pair<double, double>> terms;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    std::istringstream fields(stripped);
    double coefficient = 0.0;
    double exponent = 0.0;
    std::string rest;
    if (!(fields >> coefficient >> exponent) || (fields >> rest))
      throw ValidationError("entropy: " + path + " line " +
                            std::to_string(line) +
                            ": expected 'coefficient exponent'");
    if (!(coefficient > 0.0) || !(exponent > 1.0))
      throw ValidationError("entropy: " + path + " line " +
                            std::to_string(line) +
                            ": need coefficient > 0 and exponent > 1");
    terms.emplace_back(coefficient, exponent);
  }
  if (terms.empty())
    throw ValidationError("entropy: custom file '" + path + "' has no terms");
  return EntropySpec::power_sum(std::move(terms), entropy);
}

SCFConfig scf_config_from(const RunConfig& c) {
  SCFConfig out;
  out.mixing = c.mixing;
  out.max_iterations = c.max_iterations;
  out.tol_density = c.tol_density;
  out.tol_energy = c.tol_energy;
  out.l_max = c.l_max;
  out.k_per_channel = c.k_per_channel;
  out.r_max = c.r_max;
  out.n_points = c.n_points;
  return out;
}

}  // namespace hartree
