#include "mhn/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[192];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

double c0_bound_m0(int n, int k, std::span<const double> alpha_sup, double phi_max_abs,
                   double diam) {
  const double A = initial_amplitude(n, k, alpha_sup);
  return phi_max_abs + 2.0 * A * diam + A * diam * diam;
}

AuditEntry c0_bound_audit(const EpsPathRecord& rec, double m0) {
  AuditEntry e;
  e.name = "c0 bound: sup|eps u| <= M0 (eps=" + fmt("%.3g", rec.eps) + ")";
  e.margin = m0 - rec.sup_eps_u;
  e.status = (rec.sup_eps_u <= m0) ? AuditStatus::Pass : AuditStatus::Fail;
  e.detail = fmt("sup|eps u| = %.6g, M0 = %.6g", rec.sup_eps_u, m0);
  return e;
}

namespace {

AuditEntry uniformity_audit(std::span<const EpsPathRecord> path, double eps0,
                            double EpsPathRecord::* field, const std::string& name) {
  AuditEntry e;
  e.name = name;
  std::vector<const EpsPathRecord*> tail;
  for (const auto& r : path)
    if (r.eps <= eps0 / 4.0 + 1e-300) tail.push_back(&r);
  if (tail.size() < 2) {
    e.status = AuditStatus::Skipped;
    e.detail = "fewer than two records with eps <= eps0/4";
    return e;
  }
  double worst = 0;
  double worst_eps = 0;
  for (std::size_t j = 0; j + 1 < tail.size(); ++j) {
    const double a = tail[j]->*field;
    const double b = tail[j + 1]->*field;
    const double rel = std::abs(b - a) / std::max({std::abs(a), std::abs(b), 1e-300});
    if (rel > worst) {
      worst = rel;
      worst_eps = tail[j + 1]->eps;
    }
  }
  e.margin = 0.10 - worst;
  e.status = (worst <= 0.10) ? AuditStatus::Pass : AuditStatus::Fail;
  e.detail = fmt("max consecutive variation %.4g (worst at eps=%.3g), limit 0.1", worst, worst_eps);
  return e;
}

}  // namespace

AuditEntry gradient_bound_audit(std::span<const EpsPathRecord> path, double eps0) {
  return uniformity_audit(path, eps0, &EpsPathRecord::sup_grad,
                          "c1 estimate surrogate: sup|Du| eps-uniformity");
}

AuditEntry hessian_bound_audit(std::span<const EpsPathRecord> path, double eps0) {
  return uniformity_audit(path, eps0, &EpsPathRecord::sup_hess,
                          "c2 estimate surrogate: sup|D2u| eps-uniformity");
}

std::vector<AuditEntry> pointwise_audits(const Grid& g, const Fields& f, const DiscreteState& st,
                                     double pde_tol) {
  const int k = f.k;
  const int n = 2;

  bool ratio_pass = true, trace_pass = true, euler_pass = true, wtrace_pass = true;
  bool any_on_shell = false;
  double ratio_worst = std::numeric_limits<double>::infinity();
  double trace_worst = std::numeric_limits<double>::infinity();
  double euler_worst = 0;
  double wtrace_worst = std::numeric_limits<double>::infinity();
  std::string ratio_where, trace_where, euler_where, wtrace_where;

  std::span<const double> us(st.u.data(), std::size_t(st.u.size()));
  for (std::size_t i = 0; i < g.interior().size(); ++i) {
    const InteriorNode& nd = g.interior()[i];
    const SymMat H = g.hessian_at(us, nd);
    CoeffSample alpha;
    alpha.a.resize(std::size_t(k));
    for (int l = 0; l < k; ++l) alpha.a[std::size_t(l)] = f.alpha_interior[std::size_t(l)][Eigen::Index(i)];

    const OperatorValue op = g_eval(H, alpha);
    const bool on_shell = std::abs(op.g - alpha.a[std::size_t(k - 1)]) <= pde_tol;
    if (!on_shell) continue;
    any_on_shell = true;

    const auto where = fmt("node (%.5g, %.5g)", g.node_point(nd.ix, nd.iy).x,
                           g.node_point(nd.ix, nd.iy).y);

    const RatioBoundsReport rep = ratio_bounds_check(H, alpha, pde_tol);
    if (rep.on_shell) {
      if (rep.worst_margin < ratio_worst) {
        ratio_worst = rep.worst_margin;
        ratio_where = where;
      }
      if (!rep.pass) ratio_pass = false;
    }

    const TraceBounds tb = trace_bounds_check(H, alpha);
    const double tmargin = std::min(tb.trace - tb.lower, tb.upper - tb.trace);
    if (tmargin < trace_worst) {
      trace_worst = tmargin;
      trace_where = where;
    }
    if (!(tb.trace >= tb.lower && tb.trace < tb.upper)) trace_pass = false;

    // Euler identity from the homogeneity degrees of the two quotients
    double lhs = 0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) lhs += op.grad(r, c) * H(r, c);
    double rhs = op.gk;
    for (int l = 0; l <= k - 2; ++l) rhs += double(k - 1 - l) * alpha.a[std::size_t(l)] * op.gl[std::size_t(l)];
    const double err = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (err > euler_worst) {
      euler_worst = err;
      euler_where = where;
    }
    if (err > 1e-10) euler_pass = false;

    const double wmargin = lhs - alpha.a[std::size_t(k - 1)];
    if (wmargin < wtrace_worst) {
      wtrace_worst = wmargin;
      wtrace_where = where;
    }
    if (wmargin < -1e-9) wtrace_pass = false;
  }

  std::vector<AuditEntry> out;
  auto push = [&](std::string name, bool pass, double margin, const std::string& where,
                  const char* kind) {
    AuditEntry e;
    e.name = std::move(name);
    if (!any_on_shell) {
      e.status = AuditStatus::Skipped;
      e.detail = "no on-shell interior nodes (state does not satisfy the discrete PDE)";
    } else {
      e.status = pass ? AuditStatus::Pass : AuditStatus::Fail;
      e.margin = margin;
      e.detail = std::string(kind) + fmt(" %.4e at ", margin) + where;
    }
    out.push_back(std::move(e));
  };
  push("quotient bounds: sigma_l/sigma_{k-1} and sigma_k/sigma_{k-1}", ratio_pass, ratio_worst,
       ratio_where, "worst margin");
  push("trace bounds: (n-k+1)/k <= sum G^{ii} < n-k+1", trace_pass, trace_worst, trace_where,
       "worst margin");
  push("euler identity: sum G^{ij} u_ij vs gk + sum (k-1-l) alpha_l gl", euler_pass, euler_worst,
       euler_where, "worst relative error");
  push("weighted trace lower bound: alpha_{k-1} <= sum G^{ij} u_ij", wtrace_pass, wtrace_worst,
       wtrace_where, "worst margin");
  return out;
}

namespace oracle {

double sigma_enum(int m, std::span<const double> lam) {
  const int n = int(lam.size());
  if (n < 1 || n > kMaxEigs) throw std::invalid_argument("sigma_enum: need 1..8 entries");
  if (m < 0 || m > n) return 0.0;
  if (m == 0) return 1.0;
  double total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != m) continue;
    double prod = 1;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= lam[std::size_t(i)];
    total += prod;
  }
  return total;
}

Eigen::VectorXd pde_residual(const Grid& g, const Fields& f, const Eigen::VectorXd& u) {
  const int k = f.k;
  const double h = g.h();
  Eigen::VectorXd out(Eigen::Index(g.interior().size()));
  for (std::size_t i = 0; i < g.interior().size(); ++i) {
    const InteriorNode& nd = g.interior()[i];
    auto at = [&](int dx, int dy) { return u[g.active_index(nd.ix + dx, nd.iy + dy)]; };
    Eigen::Matrix2d H;
    H(0, 0) = (at(1, 0) - 2.0 * at(0, 0) + at(-1, 0)) / (h * h);
    H(1, 1) = (at(0, 1) - 2.0 * at(0, 0) + at(0, -1)) / (h * h);
    H(0, 1) = H(1, 0) = (at(1, 1) + at(-1, -1) - at(1, -1) - at(-1, 1)) / (4.0 * h * h);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    const std::array<double, 2> lam{es.eigenvalues()[0], es.eigenvalues()[1]};

    double num = sigma_enum(k, lam);
    for (int l = 0; l < k; ++l)
      num -= f.alpha_interior[std::size_t(l)][Eigen::Index(i)] * sigma_enum(l, lam);
    out[Eigen::Index(i)] = num / sigma_enum(k - 1, lam);
  }
  return out;
}

}  // namespace oracle

}  // namespace mhn
