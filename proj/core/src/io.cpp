#include "hartree/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hartree/errors.hpp"

namespace hartree {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

void write_file(const std::string& payload, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << payload;
  out.flush();
  if (!out) throw Error("failed while writing '" + path + "'");
}

}  // namespace

std::string solve_json(const SolveResult& result, const RunConfig& config) {
  const MixedState& st = result.state;
  std::ostringstream out;
  out << "{\n"
      << "  \"mass\": " << num(st.mass) << ",\n"
      << "  \"temperature\": " << num(st.temperature) << ",\n"
      << "  \"entropy\": " << quoted(config.entropy) << ",\n"
      << "  \"free_energy\": " << num(result.breakdown.total) << ",\n"
      << "  \"e_kin\": " << num(result.breakdown.e_kin) << ",\n"
      << "  \"e_pot\": " << num(result.breakdown.e_pot) << ",\n"
      << "  \"entropy_term\": " << num(result.breakdown.entropy_term) << ",\n"
      << "  \"mu\": " << num(st.mu) << ",\n"
      << "  \"virial_ratio\": " << num(result.breakdown.virial_ratio) << ",\n"
      << "  \"rank\": " << result.rank << ",\n"
      << "  \"converged\": " << (result.converged ? "true" : "false") << ",\n"
      << "  \"iterations\": " << result.iterations << ",\n"
      << "  \"grid\": {\"r_max\": " << num(config.r_max)
      << ", \"n_points\": " << config.n_points
      << ", \"l_max\": " << config.l_max
      << ", \"k_per_channel\": " << config.k_per_channel << "},\n"
      << "  \"occupations\": [";
  bool first = true;
  for (const LevelOccupation& lvl : st.occupations.levels) {
    if (lvl.lambda <= 1e-10 * st.mass) continue;
    if (!first) out << ", ";
    first = false;
    out << "{\"l\": " << lvl.l << ", \"n\": " << lvl.n
        << ", \"eigenvalue\": " << num(lvl.eigenvalue)
        << ", \"lambda\": " << num(lvl.lambda)
        << ", \"degeneracy\": " << lvl.degeneracy << "}";
  }
  out << "],\n"
      << "  \"diagnostics\": {\"multiplier_residual\": "
      << num(result.breakdown.multiplier_residual)
      << ", \"tail_mass_half\": " << num(result.tail_mass_half)
      << ", \"truncation_leak\": " << num(result.truncation_leak) << "}\n"
      << "}\n";
  return out.str();
}

std::string scan_csv(const ScanResult& scan) {
  if (scan.points.empty()) throw InvalidParameter("scan has no points");
  std::ostringstream out;
  out << "T,free_energy,e_kin,e_pot,entropy_term,mu,rank,lambda2,converged\n";
  for (const ScanPoint& pt : scan.points) {
    out << num(pt.temperature) << ',' << num(pt.free_energy) << ','
        << num(pt.e_kin) << ',' << num(pt.e_pot) << ','
        << num(pt.entropy_term) << ',' << num(pt.mu) << ',' << pt.rank << ','
        << num(pt.lambda2) << ',' << (pt.converged ? 1 : 0) << '\n';
  }
  if (scan.t_c_scan) out << "# t_c_scan=" << num(*scan.t_c_scan) << '\n';
  if (scan.t_c_formula)
    out << "# t_c_formula=" << num(*scan.t_c_formula) << '\n';
  if (scan.t_star) out << "# t_star=" << num(*scan.t_star) << '\n';
  out << "# concavity_violations=" << scan.concavity_violations << '\n';
  return out.str();
}

void write_solve_json(const SolveResult& result, const RunConfig& config,
                      const std::string& path) {
  write_file(solve_json(result, config), path);
}

void write_scan_csv(const ScanResult& scan, const std::string& path) {
  write_file(scan_csv(scan), path);
}

}  // namespace hartree
