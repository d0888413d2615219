#pragma once

#include <string>
#include <vector>

#include "mhn/config.hpp"
#include "mhn/verify.hpp"

namespace mhn {

/// One row of solution.csv. Band nodes carry nan in the derivative columns.
struct SolutionRow {
  double x = 0, y = 0;
  std::string kind;  // "interior" or "band"
  double v = 0;
  double dvx = 0, dvy = 0, grad_norm = 0;
  double hxx = 0, hxy = 0, hyy = 0;
  double lam1 = 0, lam2 = 0;
  double cone_margin = 0;
};

void write_solution_csv(const std::string& path, const Grid& g, const Eigen::VectorXd& v, int k);

/// Reconstructs the rows bit-exactly (values are written with %.17g).
std::vector<SolutionRow> read_solution_csv(const std::string& path);

void write_path_json(const std::string& path, const RunConfig& rc,
                     const ContinuationResult& cont, const AuditReport& report);

void write_audit_txt(const std::string& path, const AuditReport& report);

struct ConvergenceRow {
  double param = 0;  // h or eps_min
  double err_inf = 0;
  double c_err = 0;
  double c = 0;
  double observed_order = 0;  // log2 ratio vs the previous row; 0 for the first
};

void write_convergence_csv(const std::string& path, const std::string& param_name,
                           const std::vector<ConvergenceRow>& rows);

/// Gnuplot-compatible plain-text matrix (ny rows by nx columns, nan outside
/// the active set); values indexed per active node.
void write_gnuplot_matrix(const std::string& path, const Grid& g, const Eigen::VectorXd& values);

}  // namespace mhn
