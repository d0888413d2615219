#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "mhn/grid.hpp"

namespace mhn {

/// Continuation schedule and per-eps Newton settings.
struct EpsSchedule {
  double eps0 = 0.1;
  double ratio = 0.5;
  double eps_min = 1e-4;
  int max_iter = 50;
  double tol_res = 1e-9;
  double tol_step = 1e-12;
  double tau_safety = 1e-12;  // cone slack the line search insists on

  void validate() const;
  std::vector<double> eps_values() const;
};

/// Coefficient data evaluated on a grid. alpha_interior[l][i] is
/// alpha_l at interior node i; phi_band[j] is phi at band node j's
/// closest boundary point.
struct Fields {
  int k = 2;
  std::vector<Eigen::VectorXd> alpha_interior;
  std::vector<double> alpha_sup;  // sup over scan points, per l
  Eigen::VectorXd phi_band;
  double phi_max_abs = 0;  // max |phi| over boundary samples
};

/// Evaluate and validate coefficient fields: exactly k alpha expressions,
/// each strictly positive over the scan point set (ConfigError otherwise).
Fields evaluate_fields(const Grid& g, int k, std::span<const Expr> alphas, const Expr& phi);

/// Grid function plus per-interior-node Hessian data for an accepted iterate.
struct DiscreteState {
  Eigen::VectorXd u;                // over active nodes
  std::vector<SymMat> hessians;     // per interior node
  std::vector<bool> admissible;     // per interior node
  Eigen::VectorXd residual;         // per active node (interior: G - alpha_{k-1})
  double res_inf = 0;
  double min_cone_margin = 0;       // min over interior nodes of min_{i<=k} sigma_i
};

/// The comparison-function amplitude: smallest positive root of
///   2A C_n^k/C_n^{k-1} - sum_{l<=k-2} sup(alpha_l) (2A)^{-(k-1-l)} C_n^l/C_n^{k-1}
///     = sup(alpha_{k-1}).
double initial_amplitude(int n, int k, std::span<const double> alpha_sup);

/// u = scale * A * |x - center|^2; admissible everywhere by construction.
DiscreteState initial_guess(const Grid& g, const Fields& f, double scale = 1.0);

struct NewtonStats {
  int iters = 0;
  std::vector<double> res_history;  // residual inf-norm per accepted iterate
  double final_res = 0;
};

/// Damped Newton on the discretized eps-problem: interior rows
/// G(D^2 u, x) - alpha_{k-1}(x), band rows D_nu u + eps u - phi. Backtracking
/// accepts a step only when every interior node stays in the cone (with
/// tau_safety slack) and the residual decreases. eps = 0 is rejected: the
/// pure-Neumann system is singular (solutions only unique up to constants).
DiscreteState newton_solve(const Grid& g, const Fields& f, double eps,
                           const Eigen::VectorXd& u_start, const EpsSchedule& cfg,
                           NewtonStats* stats = nullptr);

struct EpsPathRecord {
  double eps = 0;
  double c_est = 0;  // -mean over active nodes of eps * u
  int newton_iters = 0;
  double final_res = 0;
  std::vector<double> res_history;
  double sup_eps_u = 0;
  double sup_grad = 0;
  double sup_hess = 0;  // spectral norm of the per-node Hessian
  double min_cone_margin = 0;
};

struct LimitSolution {
  double c = 0;           // Richardson-extrapolated limit of c_est
  Eigen::VectorXd v;      // final u minus its mean
  double v_mean_abs = 0;  // |mean(v)|, should be ~1e-16
  double interior_res_max = 0;
  double boundary_res_c_max = 0;  // max |D_nu v - (c + phi)| over the band
  std::vector<double> c_cauchy;   // |c_est_j - c_est_{j+1}|
};

struct ContinuationResult {
  std::vector<EpsPathRecord> records;
  LimitSolution limit;
  DiscreteState final_state;
};

/// Solve along eps0 > eps0*ratio > ... > eps_min, warm-starting each solve
/// from the previous one, then extract (c, v).
ContinuationResult continuation(const Grid& g, const Fields& f, const EpsSchedule& sched,
                                double initial_scale = 1.0);

}  // namespace mhn
