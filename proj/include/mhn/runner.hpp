#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mhn/io.hpp"

namespace mhn {

// Exit-status contract: 0 success (audits pass), 1 usage/config error,
// 2 solver failure, 3 audit failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitAudit = 3;

/// In-memory result of one problem solve (no files written).
struct RunArtifacts {
  Grid grid;
  Fields fields;
  ContinuationResult cont;
  AuditReport report;
  double m0 = 0;  // the explicit C0 constant used by the audit
  // reference comparison, when a manufactured u* is configured
  std::optional<double> ref_err_inf;
  std::optional<double> c_err;
};

/// Build the grid, evaluate and validate the fields, run the continuation
/// and the audits, and compare to the manufactured reference when present.
RunArtifacts run_problem(const RunConfig& rc);

/// run_problem plus output files in rc.out_dir (solution.csv, path.json,
/// audit.txt, gnuplot matrices, convergence.csv when a reference exists).
/// Returns the exit status; solver/config failures print to stderr.
int run_command(const RunConfig& rc);

/// Repeat a run over values of h or eps_min, writing per-run outputs in
/// subdirectories plus a combined sweep table with observed orders.
int sweep_command(const RunConfig& rc, const std::string& param,
                  const std::vector<double>& values);

}  // namespace mhn
