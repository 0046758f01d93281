#pragma once

#include <string>

#include "hartree/entropy.hpp"
#include "hartree/scf.hpp"

namespace hartree {

enum class Command {
  solve,
  solve_zero,
  scan,
  find_tc,
  find_tstar,
  verify,
  oracle,
};

/// The hyphenated spelling used in config files and on the command line.
std::string command_name(Command command);

/// One run of the tool. Fields unused by a command keep their defaults and
/// are carried through serialization unchanged.
struct RunConfig {
  Command command = Command::solve;
  double mass = 1.0;
  double temperature = 0.0;  // solve, verify
  double t_min = 0.0;        // scan
  double t_max = 0.0;
  int points = 0;
  std::string entropy = "power:2";
  double r_max = 100.0;
  int n_points = 5000;
  int l_max = 4;
  int k_per_channel = 4;
  double mixing = 0.8;
  int max_iterations = 500;
  double tol_density = 1e-8;
  double tol_energy = 1e-10;
  double ceiling_factor = 1000.0;  // find-tstar probe ceiling, units of T_c
  int parallel = 1;                // scan: > 1 switches to cold independent points
  std::string out;                 // output path; empty means stdout
  std::string seed = "gaussian";   // initial density; only Gaussian seeding exists

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Line-oriented `key = value`, `#` starts a comment anywhere on a line.
/// Malformed lines and unknown keys raise ParseError carrying the line
/// number; domain violations raise ValidationError naming the field.
/// Later assignments to the same key win.
RunConfig parse_config(const std::string& text);

/// parse_config without the final validation pass, for callers that merge
/// overrides (command line flags) into the parsed fields before validating
/// the assembled configuration once.
RunConfig parse_config_unchecked(const std::string& text);

/// Every field, one per line; parse_config(serialize_config(c)) == c.
/// Doubles carry 17 significant digits so the round trip is exact.
std::string serialize_config(const RunConfig& config);

/// Field domains plus per-command requirements (solve needs a positive
/// temperature, scan a positive uniform grid specification, and so on).
/// Runs at the end of parse_config; callers that override fields afterwards
/// re-validate. Throws ValidationError.
void validate_config(const RunConfig& config);

/// "power:<p>" with p > 1, or "custom:<path>" where the file holds one
/// `coefficient exponent` pair per line (`#` comments allowed), each with
/// positive coefficient and exponent > 1. File problems raise
/// ValidationError.
EntropySpec resolve_entropy(const std::string& entropy);

SCFConfig scf_config_from(const RunConfig& config);

}  // namespace hartree
