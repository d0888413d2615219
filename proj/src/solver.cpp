#include "mhn/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Residual and, when requested, the per-interior-node operator data of the
// current iterate. Throws NotAdmissibleError if any interior node leaves the
// cone, so callers must gate with admissibility checks first.
struct Evaluation {
  Eigen::VectorXd F;
  std::vector<OperatorValue> ops;  // per interior node, empty unless wanted
  double res_inf = 0;
};

Evaluation evaluate_residual(const Grid& g, const Fields& f, double eps,
                             const Eigen::VectorXd& u, bool want_ops) {
  Evaluation ev;
  ev.F.setZero(g.n_active());
  if (want_ops) ev.ops.resize(g.interior().size());

  std::span<const double> us(u.data(), std::size_t(u.size()));
  const int k = f.k;
  for (std::size_t i = 0; i < g.interior().size(); ++i) {
    const InteriorNode& nd = g.interior()[i];
    const SymMat H = g.hessian_at(us, nd);
    CoeffSample alpha;
    alpha.a.resize(std::size_t(k));
    for (int l = 0; l < k; ++l) alpha.a[std::size_t(l)] = f.alpha_interior[std::size_t(l)][Eigen::Index(i)];
    if (want_ops) {
      ev.ops[i] = g_eval(H, alpha);
      ev.F[nd.active] = ev.ops[i].g - alpha.a[std::size_t(k - 1)];
    } else {
      ev.F[nd.active] = g_value(H, alpha) - alpha.a[std::size_t(k - 1)];
    }
  }
  for (std::size_t j = 0; j < g.band().size(); ++j) {
    const BandNode& bn = g.band()[j];
    ev.F[bn.active] = neumann_residual(g, us, bn, BoundaryMode::eps(eps), f.phi_band[Eigen::Index(j)]);
  }
  ev.res_inf = ev.F.lpNorm<Eigen::Infinity>();
  return ev;
}

bool all_admissible(const Grid& g, const Eigen::VectorXd& u, int k, double tau,
                    double* min_margin = nullptr) {
  std::span<const double> us(u.data(), std::size_t(u.size()));
  double margin = std::numeric_limits<double>::infinity();
  for (const InteriorNode& nd : g.interior()) {
    const SymMat H = g.hessian_at(us, nd);
    const Spectral sp = spectral(H);
    const auto e = sigma_all(sp.eigs());
    for (int i = 1; i <= k; ++i) margin = std::min(margin, e[i]);
    if (!(margin > tau)) return false;
  }
  if (min_margin) *min_margin = margin;
  return true;
}

}  // namespace

void EpsSchedule::validate() const {
  if (!(eps0 > eps_min && eps_min > 0))
    throw ConfigError("eps schedule: need eps0 > eps_min > 0");
  if (!(ratio > 0 && ratio < 1)) throw ConfigError("eps schedule: ratio must lie in (0,1)");
  if (max_iter < 1) throw ConfigError("eps schedule: max_iter must be >= 1");
  if (!(tol_res > 0) || !(tol_step > 0)) throw ConfigError("eps schedule: tolerances must be positive");
  if (!(tau_safety >= 0)) throw ConfigError("eps schedule: tau_safety must be >= 0");
}

std::vector<double> EpsSchedule::eps_values() const {
  validate();
  std::vector<double> eps;
  double e = eps0;
  for (;;) {
    eps.push_back(e);
    if (e <= eps_min * (1.0 + 1e-12)) break;
    e = std::max(e * ratio, eps_min);
  }
  return eps;
}

Fields evaluate_fields(const Grid& g, int k, std::span<const Expr> alphas, const Expr& phi) {
  if (k < 2) throw ConfigError("k must be >= 2");
  if (k > 2) throw ConfigError("the planar solve supports k = 2 only (k <= spatial dimension)");
  if (int(alphas.size()) != k) throw ConfigError("need exactly k alpha expressions");

  const auto pts = g.scan_points();
  Fields f;
  f.k = k;
  f.alpha_interior.resize(std::size_t(k));
  f.alpha_sup.resize(std::size_t(k));
  for (int l = 0; l < k; ++l) {
    const ScanResult scan = positivity_scan(alphas[std::size_t(l)], pts);
    if (!(scan.min_value > 0)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "alpha_%d is not strictly positive: min %.6g at (%.6g, %.6g)", l,
                    scan.min_value, scan.argmin.x, scan.argmin.y);
      throw ConfigError(buf);
    }
    double sup = 0;
    for (const Point& p : pts) sup = std::max(sup, alphas[std::size_t(l)].eval(p));
    f.alpha_sup[std::size_t(l)] = sup;

    Eigen::VectorXd vals(Eigen::Index(g.interior().size()));
    for (std::size_t i = 0; i < g.interior().size(); ++i) {
      const InteriorNode& nd = g.interior()[i];
      vals[Eigen::Index(i)] = alphas[std::size_t(l)].eval(g.node_point(nd.ix, nd.iy));
    }
    f.alpha_interior[std::size_t(l)] = std::move(vals);
  }

  f.phi_band.resize(Eigen::Index(g.band().size()));
  for (std::size_t j = 0; j < g.band().size(); ++j)
    f.phi_band[Eigen::Index(j)] = phi.eval(g.band()[j].bpoint);
  f.phi_max_abs = 0;
  for (const Point& p : g.boundary_samples(4096))
    f.phi_max_abs = std::max(f.phi_max_abs, std::abs(phi.eval(p)));
  return f;
}

double initial_amplitude(int n, int k, std::span<const double> alpha_sup) {
  if (int(alpha_sup.size()) != k) throw std::invalid_argument("initial_amplitude: need k sup values");
  const double ck = double(binomial(n, k)) / double(binomial(n, k - 1));
  auto fval = [&](double A) {
    double v = 2.0 * A * ck - alpha_sup[std::size_t(k - 1)];
    for (int l = 0; l <= k - 2; ++l)
      v -= alpha_sup[std::size_t(l)] * std::pow(2.0 * A, -double(k - 1 - l)) *
           double(binomial(n, l)) / double(binomial(n, k - 1));
    return v;
  };
  double hi = 1.0;
  while (fval(hi) <= 0) {
    hi *= 2.0;
    if (hi > 1e12) throw SolverError("initial_amplitude: no bracketing amplitude found");
  }
  double lo = hi * 1e-12;
  while (fval(lo) >= 0) lo *= 0.5;  // f -> -inf as A -> 0+, so this terminates fast
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fval(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DiscreteState initial_guess(const Grid& g, const Fields& f, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("initial_guess: scale must be positive");
  const double A = scale * initial_amplitude(2, f.k, f.alpha_sup);
  const Point c = g.domain().center;

  DiscreteState st;
  st.u.setZero(g.n_active());
  for (const InteriorNode& nd : g.interior()) {
    const Point q = g.node_point(nd.ix, nd.iy);
    st.u[nd.active] = A * ((q.x - c.x) * (q.x - c.x) + (q.y - c.y) * (q.y - c.y));
  }
  for (const BandNode& bn : g.band()) {
    st.u[bn.active] =
        A * ((bn.node.x - c.x) * (bn.node.x - c.x) + (bn.node.y - c.y) * (bn.node.y - c.y));
  }
  st.hessians.assign(g.interior().size(), SymMat::identity(2).scaled(2.0 * A));
  st.admissible.assign(g.interior().size(), true);
  return st;
}

DiscreteState newton_solve(const Grid& g, const Fields& f, double eps,
                           const Eigen::VectorXd& u_start, const EpsSchedule& cfg,
                           NewtonStats* stats) {
  cfg.validate();
  if (!(eps > 0))
    throw std::invalid_argument("newton_solve: eps must be > 0 (the eps = 0 system is singular)");
  if (!g.closure_ok()) throw GridError("newton_solve: grid too coarse near the boundary");
  const int N = g.n_active();
  if (u_start.size() != N) throw std::invalid_argument("newton_solve: start vector has wrong size");
  const int k = f.k;

  Eigen::VectorXd u = u_start;
  if (!all_admissible(g, u, k, cfg.tau_safety))
    throw NotAdmissibleError("newton_solve: start iterate is not admissible");

  Evaluation ev = evaluate_residual(g, f, eps, u, /*want_ops=*/true);
  NewtonStats local;
  NewtonStats& ns = stats ? *stats : local;
  ns.res_history.clear();
  ns.res_history.push_back(ev.res_inf);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern_done = false;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if (ev.res_inf <= cfg.tol_res) break;

    // Jacobian: interior rows combine G^{ij} with the stencil coefficients,
    // scaled by 1/sum G^{ii} for conditioning; band rows are linear in u.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.interior().size() * 9 + g.band().size() * 24);
    Eigen::VectorXd rhs(N);
    const double h2 = g.h() * g.h();
    for (std::size_t i = 0; i < g.interior().size(); ++i) {
      const InteriorNode& nd = g.interior()[i];
      const SymMat& Gm = ev.ops[i].grad;
      const double sc = 1.0 / (Gm(0, 0) + Gm(1, 1));
      const double gxx = Gm(0, 0) * sc / h2;
      const double gyy = Gm(1, 1) * sc / h2;
      const double gxy = 2.0 * Gm(0, 1) * sc / (4.0 * h2);
      const int row = nd.active;
      auto add = [&](int dx, int dy, double v) {
        trip.emplace_back(row, g.active_index(nd.ix + dx, nd.iy + dy), v);
      };
      add(0, 0, -2.0 * gxx - 2.0 * gyy);
      add(1, 0, gxx);
      add(-1, 0, gxx);
      add(0, 1, gyy);
      add(0, -1, gyy);
      add(1, 1, gxy);
      add(-1, -1, gxy);
      add(1, -1, -gxy);
      add(-1, 1, -gxy);
      rhs[row] = -ev.F[row] * sc;
    }
    for (const BandNode& bn : g.band()) {
      const int row = bn.active;
      for (const auto& [idx, w] : bn.dnu) trip.emplace_back(row, idx, w);
      for (const auto& [idx, w] : bn.uval) trip.emplace_back(row, idx, eps * w);
      rhs[row] = -ev.F[row];
    }

    Eigen::SparseMatrix<double> J(N, N);
    J.setFromTriplets(trip.begin(), trip.end());
    // equilibrate rows to O(1) coefficients; the rhs is scaled identically so
    // the Newton step is unchanged
    Eigen::VectorXd row_max = Eigen::VectorXd::Zero(N);
    for (int col = 0; col < J.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(J, col); it; ++it)
        row_max[it.row()] = std::max(row_max[it.row()], std::abs(it.value()));
    for (int col = 0; col < J.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(J, col); it; ++it)
        it.valueRef() /= row_max[it.row()];
    rhs.array() /= row_max.array();

    if (!pattern_done) {
      lu.analyzePattern(J);
      pattern_done = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw LinearSolveError("newton_solve: LU factorization failed");

    Eigen::VectorXd d = lu.solve(rhs);
    // refine until the contract holds: normwise relative (backward) residual
    // ||J d - rhs|| / (||J|| ||d|| + ||rhs||) <= 1e-12
    const double j_norm = std::sqrt(Eigen::Map<const Eigen::VectorXd>(J.valuePtr(), J.nonZeros()).squaredNorm());
    auto lin_rel = [&] {
      return (J * d - rhs).norm() / std::max(j_norm * d.norm() + rhs.norm(), 1e-300);
    };
    double rel = lin_rel();
    for (int refine = 0; refine < 3 && rel > 1e-12; ++refine) {
      d += lu.solve(rhs - J * d);
      rel = lin_rel();
    }
    if (rel > 1e-12)
      throw LinearSolveError("newton_solve: linear solve missed the 1e-12 relative residual contract");

    // backtracking: admissible (with slack) and strictly decreasing
    double t = 1.0;
    bool accepted = false;
    for (int back = 0; back <= 20; ++back, t *= 0.5) {
      const Eigen::VectorXd u_try = u + t * d;
      if (!all_admissible(g, u_try, k, cfg.tau_safety)) continue;
      Evaluation ev_try;
      try {
        ev_try = evaluate_residual(g, f, eps, u_try, /*want_ops=*/true);
      } catch (const NotAdmissibleError&) {
        continue;  // ellipticity lost at the trial point
      }
      if (ev_try.res_inf < ev.res_inf) {
        if (t * d.lpNorm<Eigen::Infinity>() <= cfg.tol_step && ev_try.res_inf > cfg.tol_res)
          throw LineSearchStallError("newton_solve: step below tol_step at residual " +
                                     fmt("%.3e", ev_try.res_inf));
        u = u_try;
        ev = std::move(ev_try);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw LineSearchStallError("newton_solve: no admissible decreasing step above damping 2^-20"
                                 " at residual " + fmt("%.3e", ev.res_inf));
    ns.iters = iter + 1;
    ns.res_history.push_back(ev.res_inf);
  }

  if (ev.res_inf > cfg.tol_res)
    throw MaxItersError("newton_solve: residual " + fmt("%.3e", ev.res_inf) + " after " +
                        std::to_string(cfg.max_iter) + " iterations");
  ns.final_res = ev.res_inf;

  DiscreteState st;
  st.u = std::move(u);
  st.residual = std::move(ev.F);
  st.res_inf = ev.res_inf;
  st.hessians.resize(g.interior().size());
  st.admissible.assign(g.interior().size(), false);
  std::span<const double> us(st.u.data(), std::size_t(st.u.size()));
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.interior().size(); ++i) {
    st.hessians[i] = g.hessian_at(us, g.interior()[i]);
    const Spectral sp = spectral(st.hessians[i]);
    st.admissible[i] = in_cone(sp.eigs(), k);
    const auto e = sigma_all(sp.eigs());
    for (int t = 1; t <= k; ++t) margin = std::min(margin, e[t]);
  }
  st.min_cone_margin = margin;
  return st;
}

ContinuationResult continuation(const Grid& g, const Fields& f, const EpsSchedule& sched,
                                double initial_scale) {
  const auto eps_list = sched.eps_values();
  ContinuationResult out;
  out.records.reserve(eps_list.size());

  DiscreteState state = initial_guess(g, f, initial_scale);
  const double n_active = double(g.n_active());

  for (double eps : eps_list) {
    NewtonStats ns;
    try {
      state = newton_solve(g, f, eps, state.u, sched, &ns);
    } catch (const SolverError& e) {
      throw SolverError("continuation failed at eps=" + fmt("%.6g", eps) + ": " + e.what());
    } catch (const NotAdmissibleError& e) {
      throw SolverError("continuation failed at eps=" + fmt("%.6g", eps) + ": " + e.what());
    }

    EpsPathRecord rec;
    rec.eps = eps;
    rec.c_est = -eps * state.u.sum() / n_active;
    rec.newton_iters = ns.iters;
    rec.final_res = ns.final_res;
    rec.res_history = ns.res_history;
    rec.sup_eps_u = eps * state.u.lpNorm<Eigen::Infinity>();
    rec.min_cone_margin = state.min_cone_margin;
    std::span<const double> us(state.u.data(), std::size_t(state.u.size()));
    for (std::size_t i = 0; i < g.interior().size(); ++i) {
      const Point gr = g.gradient_at(us, g.interior()[i]);
      rec.sup_grad = std::max(rec.sup_grad, std::hypot(gr.x, gr.y));
      const Spectral sp = spectral(state.hessians[i]);
      rec.sup_hess = std::max(rec.sup_hess, std::max(std::abs(sp.lam[0]), std::abs(sp.lam[1])));
    }
    out.records.push_back(std::move(rec));
  }

  LimitSolution& lim = out.limit;
  const std::size_t nrec = out.records.size();
  for (std::size_t j = 0; j + 1 < nrec; ++j)
    lim.c_cauchy.push_back(std::abs(out.records[j].c_est - out.records[j + 1].c_est));
  if (nrec >= 2) {
    // c_est(eps) ~ c + b*eps; two-point elimination of the linear term
    const double e1 = out.records[nrec - 2].eps, c1 = out.records[nrec - 2].c_est;
    const double e2 = out.records[nrec - 1].eps, c2 = out.records[nrec - 1].c_est;
    lim.c = (c2 * e1 - c1 * e2) / (e1 - e2);
  } else {
    lim.c = out.records.back().c_est;
  }

  lim.v = state.u;
  lim.v.array() -= lim.v.mean();
  lim.v.array() -= lim.v.mean();  // second pass clears the rounding residue
  lim.v_mean_abs = std::abs(lim.v.mean());

  for (const InteriorNode& nd : g.interior())
    lim.interior_res_max = std::max(lim.interior_res_max, std::abs(state.residual[nd.active]));
  std::span<const double> vs(lim.v.data(), std::size_t(lim.v.size()));
  for (std::size_t j = 0; j < g.band().size(); ++j) {
    const double r = neumann_residual(g, vs, g.band()[j], BoundaryMode::fixed_c(lim.c),
                                      f.phi_band[Eigen::Index(j)]);
    lim.boundary_res_c_max = std::max(lim.boundary_res_c_max, std::abs(r));
  }

  out.final_state = std::move(state);
  return out;
}

}  // namespace mhn
