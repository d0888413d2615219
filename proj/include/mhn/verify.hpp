#pragma once

#include <Eigen/Core>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mhn/solver.hpp"

namespace mhn {

enum class AuditStatus { Pass, Fail, Skipped };

struct AuditEntry {
  std::string name;
  AuditStatus status = AuditStatus::Skipped;
  std::string detail;  // worst margins and locations, or the skip reason
  double margin = std::numeric_limits<double>::quiet_NaN();
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  bool all_ok() const {
    for (const auto& e : entries)
      if (e.status == AuditStatus::Fail) return false;
    return true;
  }
};

/// The explicit C0 constant: M_0 = max_{boundary} |phi| + 2 A diam + A diam^2
/// with A the comparison-function amplitude built from sup-norms of alpha.
double c0_bound_m0(int n, int k, std::span<const double> alpha_sup, double phi_max_abs,
                   double diam);

/// sup |eps u| <= M_0 for one converged eps-record.
AuditEntry c0_bound_audit(const EpsPathRecord& rec, double m0);

/// eps-uniformity surrogate for the C1 estimate: once eps <= eps0/4, sup|Du|
/// may vary by at most 10% between consecutive records. Paths with fewer than
/// two qualifying records are skipped.
AuditEntry gradient_bound_audit(std::span<const EpsPathRecord> path, double eps0);

/// Same contract applied to the spectral norm of the per-node Hessians.
AuditEntry hessian_bound_audit(std::span<const EpsPathRecord> path, double eps0);

/// Pointwise checks on a state satisfying the discrete PDE: quotient bounds, trace in [(n-k+1)/k, n-k+1), the Euler
/// identity sum G^{ij} W_ij = gk + sum (k-1-l) alpha_l sigma_l/sigma_{k-1}
/// to 1e-10, and the on-shell lower bound alpha_{k-1} <= sum G^{ij} W_ij.
std::vector<AuditEntry> pointwise_audits(const Grid& g, const Fields& f, const DiscreteState& st,
                                     double pde_tol = 1e-8);

namespace oracle {

/// sigma_m by direct subset enumeration; the independent route the recurrence
/// is checked against.
double sigma_enum(int m, std::span<const double> lam);

/// PDE residual (sigma_k - sum_l alpha_l sigma_l)/sigma_{k-1} at every
/// interior node, with eigenvalues from Eigen's self-adjoint solver and all
/// sigma by subset enumeration: independent of the main evaluation path.
/// Returns one value per interior node, in interior() order.
Eigen::VectorXd pde_residual(const Grid& g, const Fields& f, const Eigen::VectorXd& u);

}  // namespace oracle

}  // namespace mhn
