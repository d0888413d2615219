#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mhn/verify.hpp"
#include "support/sampling.hpp"

using namespace mhn;

TEST_CASE("explicit M0 reproduces the worked constant") {
  // unit disk, alpha = (0.5, 0.25), phi = 1: A = 0.5 and M0 = 1 + 2 + 2 = 5
  const std::vector<double> sup{0.5, 0.25};
  CHECK(c0_bound_m0(2, 2, sup, 1.0, 2.0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("c0 audit on a converged path") {
  const Grid g = build_grid(DomainSpec::disk(1.0), 1.0 / 10);
  const std::vector<Expr> alphas{Expr::parse("0.5"), Expr::parse("0.25")};
  const Fields f = evaluate_fields(g, 2, alphas, Expr::parse("1"));
  EpsSchedule sched;
  const ContinuationResult res = continuation(g, f, sched);
  const double m0 = c0_bound_m0(2, 2, f.alpha_sup, f.phi_max_abs, g.domain().diameter());
  CHECK(m0 == doctest::Approx(5.0).epsilon(1e-9));
  for (const EpsPathRecord& rec : res.records) {
    const AuditEntry e = c0_bound_audit(rec, m0);
    CHECK(e.status == AuditStatus::Pass);
    CHECK(e.margin > 1.0);  // wide margin on the manufactured problem
  }
}

TEST_CASE("eps-uniformity audits") {
  auto rec = [](double eps, double grad, double hess) {
    EpsPathRecord r;
    r.eps = eps;
    r.sup_grad = grad;
    r.sup_hess = hess;
    return r;
  };

  std::vector<EpsPathRecord> path{rec(0.1, 1.0, 1.0), rec(0.05, 1.2, 1.0),
                                  rec(0.025, 1.01, 1.0), rec(0.0125, 1.03, 1.0)};
  CHECK(gradient_bound_audit(path, 0.1).status == AuditStatus::Pass);
  CHECK(hessian_bound_audit(path, 0.1).status == AuditStatus::Pass);

  // a 30% jump below eps0/4 fails
  path.push_back(rec(0.00625, 1.35, 1.0));
  CHECK(gradient_bound_audit(path, 0.1).status == AuditStatus::Fail);
  CHECK(hessian_bound_audit(path, 0.1).status == AuditStatus::Pass);

  // single-record path: skipped
  const std::vector<EpsPathRecord> single{rec(0.1, 1.0, 1.0)};
  CHECK(gradient_bound_audit(single, 0.1).status == AuditStatus::Skipped);
}

TEST_CASE("pointwise audits pass on a solved state and skip off-shell") {
  const Grid g = build_grid(DomainSpec::disk(1.0), 1.0 / 12);
  const std::vector<Expr> alphas{Expr::parse("0.5"), Expr::parse("0.25")};
  const Fields f = evaluate_fields(g, 2, alphas, Expr::parse("1"));
  const ContinuationResult res = continuation(g, f, EpsSchedule{});

  const auto entries = pointwise_audits(g, f, res.final_state);
  REQUIRE(entries.size() == 4);
  for (const AuditEntry& e : entries) {
    CAPTURE(e.name);
    CHECK(e.status == AuditStatus::Pass);
  }

  // far from the solution every interior node is off-shell: all skipped
  DiscreteState off = initial_guess(g, f, 3.0);
  for (const AuditEntry& e : pointwise_audits(g, f, off))
    CHECK(e.status == AuditStatus::Skipped);
}

TEST_CASE("weighted-trace display at the identity state") {
  // identity Hessian with alpha = (0.5, 0.25): sum G^{ij} u_ij
  //   = alpha_1 + 2 alpha_0 sigma_0/sigma_1 = 0.25 + 0.5 = 0.75 >= inf alpha_1
  const CoeffSample alpha{0.5, 0.25};
  const OperatorValue op = g_eval(SymMat::identity(2), alpha);
  double lhs = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) lhs += op.grad(i, j) * SymMat::identity(2)(i, j);
  CHECK(lhs == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(lhs >= 0.25);
}

TEST_CASE("subset enumeration agrees with the recurrence") {
  auto rng = mhnt::make_rng(6);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = dim(rng);
    std::vector<double> lam(n, 0.0);
    for (auto& v : lam) v = unif(rng);
    for (int m = 0; m <= n; ++m) {
      const double a = sigma(m, lam);
      const double b = oracle::sigma_enum(m, lam);
      REQUIRE(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}));
    }
  }
  // k = n = 2: sigma_2 is the determinant
  CHECK(oracle::sigma_enum(2, std::vector<double>{3.0, 7.0}) == 21.0);
}

TEST_CASE("brute-force pde residual matches the solver path") {
  const Grid g = build_grid(DomainSpec::disk(1.0), 0.2);  // a 12x12-scale grid
  const std::vector<Expr> alphas{Expr::parse("0.5 - 0.1*r^2"), Expr::parse("0.25")};
  const Fields f = evaluate_fields(g, 2, alphas, Expr::parse("1"));

  // quadratic u: residual has a closed form through sigma_2 = det
  Eigen::VectorXd uq(g.n_active());
  for (const InteriorNode& nd : g.interior()) {
    const Point q = g.node_point(nd.ix, nd.iy);
    uq[nd.active] = 0.7 * q.x * q.x + 0.55 * q.y * q.y + 0.1 * q.x * q.y;
  }
  for (const BandNode& bn : g.band())
    uq[bn.active] = 0.7 * bn.node.x * bn.node.x + 0.55 * bn.node.y * bn.node.y +
                    0.1 * bn.node.x * bn.node.y;
  const Eigen::VectorXd orc = oracle::pde_residual(g, f, uq);
  const double det = 1.4 * 1.1 - 0.1 * 0.1;
  const double tr = 1.4 + 1.1;
  for (std::size_t i = 0; i < g.interior().size(); ++i) {
    const InteriorNode& nd = g.interior()[i];
    const Point q = g.node_point(nd.ix, nd.iy);
    const double alpha0 = 0.5 - 0.1 * (q.x * q.x + q.y * q.y);
    const double want = (det - alpha0 - 0.25 * tr) / tr;
    REQUIRE(orc[Eigen::Index(i)] == doctest::Approx(want).epsilon(1e-12));
  }

  // random admissible u: oracle vs main-path residual to 1e-10
  auto rng = mhnt::make_rng(12);
  std::uniform_real_distribution<double> amp(-0.05, 0.05);
  Eigen::VectorXd u(g.n_active());
  const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
  auto field = [&](double x, double y) {
    return 0.6 * (x * x + y * y) + a1 * std::sin(3 * x) * std::cos(2 * y) +
           a2 * std::exp(0.5 * x) + a3 * x * y * y;
  };
  for (const InteriorNode& nd : g.interior()) {
    const Point q = g.node_point(nd.ix, nd.iy);
    u[nd.active] = field(q.x, q.y);
  }
  for (const BandNode& bn : g.band()) u[bn.active] = field(bn.node.x, bn.node.y);

  const Eigen::VectorXd orc2 = oracle::pde_residual(g, f, u);
  std::span<const double> us(u.data(), std::size_t(u.size()));
  for (std::size_t i = 0; i < g.interior().size(); ++i) {
    const InteriorNode& nd = g.interior()[i];
    const SymMat H = g.hessian_at(us, nd);
    CoeffSample alpha{f.alpha_interior[0][Eigen::Index(i)], f.alpha_interior[1][Eigen::Index(i)]};
    REQUIRE(in_cone(spectral(H).eigs(), 2));
    const double main_res = g_value(H, alpha) - alpha.a[1];
    REQUIRE(std::abs(main_res - orc2[Eigen::Index(i)]) <= 1e-10);
  }
}
