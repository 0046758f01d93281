#pragma once

#include <string>

#include "hartree/config.hpp"
#include "hartree/phase_diagram.hpp"
#include "hartree/scf.hpp"

namespace hartree {

/// JSON for one solve. All numbers carry 17 significant digits, the
/// occupations array lists only occupied levels (lambda > 1e-10 M), and the
/// payload contains no timestamps: identical runs serialize identically.
/// The config supplies the run metadata (entropy string, grid block).
std::string solve_json(const SolveResult& result, const RunConfig& config);

/// CSV with header T,free_energy,e_kin,e_pot,entropy_term,mu,rank,lambda2,
/// converged, one row per point, then the engaged summaries as trailing
/// `# key=value` comment lines. Throws InvalidParameter for an empty scan.
std::string scan_csv(const ScanResult& scan);

/// Same payloads written to disk; failures to open or flush surface as Error.
void write_solve_json(const SolveResult& result, const RunConfig& config,
                      const std::string& path);
void write_scan_csv(const ScanResult& scan, const std::string& path);

}  // namespace hartree
