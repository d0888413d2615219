#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mhn/errors.hpp"
#include "mhn/hessop.hpp"
#include "support/sampling.hpp"

using namespace mhn;

namespace {

SymMat sym2(double a00, double a01, double a11) {
  SymMat w(2);
  w.set(0, 0, a00);
  w.set(0, 1, a01);
  w.set(1, 1, a11);
  return w;
}

// central finite differences of g_value in the (i,j) symmetric direction
double fd_gradient(const SymMat& w, const CoeffSample& alpha, int i, int j, double step) {
  SymMat wp = w, wm = w;
  wp.set(i, j, w(i, j) + step);
  wm.set(i, j, w(i, j) - step);
  const double d = (g_value(wp, alpha) - g_value(wm, alpha)) / (2.0 * step);
  return (i == j) ? d : 0.5 * d;  // dW_ij and dW_ji both move with the stored entry
}

}  // namespace

TEST_CASE("spectral: fixed matrices") {
  const Spectral id = spectral(SymMat::identity(2));
  CHECK(id.lam[0] == 1.0);
  CHECK(id.lam[1] == 1.0);
  CHECK(id.qv(0, 0) == 1.0);
  CHECK(id.qv(1, 1) == 1.0);

  const Spectral d = spectral(SymMat::diagonal(std::vector<double>{3, 1}));
  CHECK(d.lam[0] == 3.0);
  CHECK(d.lam[1] == 1.0);
  CHECK(d.qv(0, 0) == 1.0);

  const Spectral offd = spectral(sym2(0, 1, 0));
  CHECK(offd.lam[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(offd.lam[1] == doctest::Approx(-1.0).epsilon(1e-15));
  const double s = std::sqrt(0.5);
  CHECK(offd.qv(0, 0) == doctest::Approx(s));  // rotation by 45 degrees
  CHECK(offd.qv(1, 0) == doctest::Approx(s));
  CHECK(offd.qv(0, 1) == doctest::Approx(s));
  CHECK(offd.qv(1, 1) == doctest::Approx(-s));
}

TEST_CASE("spectral: random symmetric matrices reconstruct") {
  auto rng = mhnt::make_rng(31);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = (trial % 2) ? 2 : 3;
    SymMat w(n);
    double scale = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = unif(rng);
        w.set(i, j, v);
        scale = std::max(scale, std::abs(v));
      }
    const Spectral sp = spectral(w);
    REQUIRE(sp.lam[0] >= sp.lam[std::size_t(n - 1)]);
    // Q^T Q = I to 1e-12
    for (int c1 = 0; c1 < n; ++c1)
      for (int c2 = 0; c2 < n; ++c2) {
        double dot = 0;
        for (int r = 0; r < n; ++r) dot += sp.qv(r, c1) * sp.qv(r, c2);
        REQUIRE(std::abs(dot - (c1 == c2 ? 1.0 : 0.0)) <= 1e-12);
      }
    // Q diag(lam) Q^T reproduces W to 1e-10 relative
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0;
        for (int t = 0; t < n; ++t) v += sp.lam[std::size_t(t)] * sp.qv(i, t) * sp.qv(j, t);
        REQUIRE(std::abs(v - w(i, j)) <= 1e-10 * std::max(1.0, scale));
      }
    // orientation: first component of noticeable size is positive
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) {
        if (std::abs(sp.qv(r, c)) > 1e-12) {
          REQUIRE(sp.qv(r, c) > 0.0);
          break;
        }
      }
  }
}

TEST_CASE("g_value fixed examples") {
  CHECK(g_value(SymMat::identity(2), CoeffSample{0.5, 1.0}) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g_value(SymMat::identity(3), CoeffSample{0.3, 1.0}) ==
        doctest::Approx(0.9).epsilon(1e-15));
  CHECK(g_value(SymMat::diagonal(std::vector<double>{2, 1}), CoeffSample{0.6, 1.0}) ==
        doctest::Approx(1.4 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(g_value(SymMat::diagonal(std::vector<double>{1, -5}), CoeffSample{0.5, 1.0}),
                  NotAdmissibleError);
}

TEST_CASE("g_gradient at the identity") {
  // both diagonal entries 0.375: (1*2 - 1*1)/4 plus 0.5 * 1/4 from the alpha_0 term
  const SymMat grad = g_gradient(SymMat::identity(2), CoeffSample{0.5, 1.0});
  CHECK(grad(0, 0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(grad(1, 1) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(grad(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("g_gradient vs finite differences, ellipticity, euler identity") {
  auto rng = mhnt::make_rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = (trial % 2) ? 2 : 3;
    std::uniform_int_distribution<int> kdist(2, n);
    const int k = kdist(rng);
    const SymMat w = mhnt::random_admissible(rng, n, k, 0.3);
    const CoeffSample alpha = mhnt::sample_alpha(rng, k);

    const OperatorValue op = g_eval(w, alpha);

    double grad_scale = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) grad_scale = std::max(grad_scale, std::abs(op.grad(i, j)));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double fd = fd_gradient(w, alpha, i, j, 1e-5);
        REQUIRE(std::abs(fd - op.grad(i, j)) <= 1e-6 * std::max(1.0, grad_scale));
      }

    // ellipticity: the gradient is positive definite
    const Spectral gsp = spectral(op.grad);
    REQUIRE(gsp.lam[std::size_t(n - 1)] > 0);

    // Euler identity from the homogeneity degrees
    double lhs = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lhs += op.grad(i, j) * w(i, j);
    double rhs = op.gk;
    for (int l = 0; l <= k - 2; ++l) rhs += double(k - 1 - l) * alpha.a[std::size_t(l)] * op.gl[std::size_t(l)];
    REQUIRE(std::abs(lhs - rhs) <= 1e-10 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
}

TEST_CASE("gradient stays finite-difference-consistent near eigenvalue multiplicity") {
  // nearly repeated eigenvalues: the spectral-function first derivative needs
  // no divided-difference terms, so the rotated diagonal formula must agree
  auto rng = mhnt::make_rng(5150);
  for (int trial = 0; trial < 100; ++trial) {
    const double gap = (trial % 2) ? 1e-8 : 0.0;
    const SymMat w = mhnt::rotate_diag(rng, {2.0 + gap, 2.0, 1.5});
    const CoeffSample alpha = mhnt::sample_alpha(rng, 2);
    const SymMat grad = g_gradient(w, alpha);
    double scale = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) scale = std::max(scale, std::abs(grad(i, j)));
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        REQUIRE(std::abs(fd_gradient(w, alpha, i, j, 1e-5) - grad(i, j)) <=
                1e-6 * std::max(1.0, scale));
  }
}

TEST_CASE("rotation equivariance of g_value") {
  auto rng = mhnt::make_rng(4242);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = (trial % 2) ? 2 : 3;
    const auto lam = mhnt::sample_cone(rng, n, 2, 0.1, -3.0, 3.0);
    const CoeffSample alpha = mhnt::sample_alpha(rng, 2);
    const double direct = g_value(SymMat::diagonal(lam), alpha);
    const double rotated = g_value(mhnt::rotate_diag(rng, lam), alpha);
    REQUIRE(std::abs(direct - rotated) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("trace bounds") {
  const TraceBounds tb2 = trace_bounds_check(SymMat::identity(2), CoeffSample{0.5, 1.0});
  CHECK(tb2.trace == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(tb2.lower == 0.5);
  CHECK(tb2.upper == 1.0);

  // I_3 with k=2, alpha_0=0.3: each dG/dlam_i = 1/3 + 0.3/9
  const TraceBounds tb3 = trace_bounds_check(SymMat::identity(3), CoeffSample{0.3, 1.0});
  CHECK(tb3.trace == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(tb3.lower == 1.0);
  CHECK(tb3.upper == 2.0);

  // on-shell samples: draw lam and alpha_0..alpha_{k-2}, let the equation set
  // alpha_{k-1}, and check the bounds
  auto rng = mhnt::make_rng(10);
  static const int regimes[][2] = {{2, 2}, {3, 2}, {3, 3}};
  for (const auto& re : regimes) {
    const int n = re[0], k = re[1];
    int done = 0;
    while (done < 200) {
      const auto lam = mhnt::sample_cone(rng, n, k, 1e-6, -5.0, 5.0);
      CoeffSample partial = mhnt::sample_alpha(rng, k);
      const auto e = sigma_all(lam);
      double akm1 = e[k] / e[k - 1];
      for (int l = 0; l <= k - 2; ++l) akm1 -= partial.a[std::size_t(l)] * e[l] / e[k - 1];
      if (!(akm1 > 1e-6)) continue;
      partial.a[std::size_t(k - 1)] = akm1;
      const TraceBounds tb = trace_bounds_check(mhnt::rotate_diag(rng, lam), partial);
      REQUIRE(tb.trace >= tb.lower * (1 - 1e-12));
      REQUIRE(tb.trace < tb.upper);
      ++done;
    }
  }
}

TEST_CASE("minimal-eigenvalue derivative bounds") {
  // negative first entry needs n >= 3: in Gamma_2 with n = 2 both entries are positive
  const std::vector<double> lam{-0.1, 3.0, 3.0};  // sigma_1 = 5.9, sigma_2 = 8.4 > 0
  REQUIRE(in_cone(lam, 2));
  const auto db = min_eig_derivative_check(lam, CoeffSample{0.01, 1.0},
                                           MinEigMode::NegativeLambda1);
  CHECK(db.lhs >= db.rhs);

  CHECK_THROWS_AS(min_eig_derivative_check(std::vector<double>{0.1, 3.0, 3.0},
                                           CoeffSample{0.01, 1.0}, MinEigMode::NegativeLambda1),
                  std::invalid_argument);

  // pinch mode sample with delta = eps = 0.5
  const std::vector<double> pinch{2.0, 3.0, -1.05};
  REQUIRE(in_cone(pinch, 2));
  const auto dp = min_eig_derivative_check(pinch, CoeffSample{0.2, 1.0}, MinEigMode::Pinch, 0.5, 0.5);
  CHECK(dp.lhs >= dp.rhs);
  CHECK_THROWS_AS(min_eig_derivative_check(std::vector<double>{2.0, 3.0, -0.1},
                                           CoeffSample{0.2, 1.0}, MinEigMode::Pinch, 0.5, 0.5),
                  std::invalid_argument);  // -lam_n < eps lam_1

  // sampled regimes; record how far from equality the samples stay
  auto rng = mhnt::make_rng(88);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double min_ratio = std::numeric_limits<double>::infinity();
  int neg_done = 0;
  while (neg_done < 300) {
    std::vector<double> t{-2.0 * u01(rng) - 1e-3, 10.0 * u01(rng), 10.0 * u01(rng)};
    if (!in_cone(t, 2)) continue;
    const auto r = min_eig_derivative_check(t, mhnt::sample_alpha(rng, 2),
                                            MinEigMode::NegativeLambda1);
    REQUIRE(r.lhs >= r.rhs * (1 - 1e-12));
    if (r.rhs > 0) min_ratio = std::min(min_ratio, r.lhs / r.rhs);
    ++neg_done;
  }
  MESSAGE("negative-lambda1 empirical min lhs/rhs: ", min_ratio);
  CHECK(min_ratio >= 1.0);

  int pinch_done = 0;
  while (pinch_done < 300) {
    const double l2 = 0.5 + 4.5 * u01(rng);
    const double l1 = 0.5 * l2 + 4.0 * u01(rng);
    const double l3 = -(0.5 * l1 + 3.0 * u01(rng));
    std::vector<double> t{l1, l2, l3};
    if (!(l3 < 0 && l2 >= l3 && in_cone(t, 2))) continue;
    const auto r = min_eig_derivative_check(t, mhnt::sample_alpha(rng, 2), MinEigMode::Pinch,
                                            0.5, 0.5);
    REQUIRE(r.lhs >= r.rhs * (1 - 1e-12));
    ++pinch_done;
  }
}

TEST_CASE("midpoint concavity") {
  const CoeffSample alpha{0.5, 1.0};
  const SymMat w1 = SymMat::diagonal(std::vector<double>{3, 1});
  const SymMat w2 = SymMat::diagonal(std::vector<double>{1, 3});

  const auto same = concavity_probe(w1, w1, alpha);
  CHECK(same.mid == doctest::Approx(same.chord).epsilon(1e-15));

  const auto pr = concavity_probe(w1, w2, alpha);
  CHECK(pr.mid == doctest::Approx(0.875).epsilon(1e-15));    // G(diag(2,2))
  CHECK(pr.chord == doctest::Approx(0.625).epsilon(1e-15));  // G(diag(3,1))
  CHECK(pr.mid > pr.chord);

  auto rng = mhnt::make_rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = (trial % 2) ? 2 : 3;
    std::uniform_int_distribution<int> kdist(2, n);
    const int k = kdist(rng);
    const SymMat a = mhnt::random_admissible(rng, n, k, 1e-3);
    const SymMat b = mhnt::random_admissible(rng, n, k, 1e-3);
    const auto p = concavity_probe(a, b, mhnt::sample_alpha(rng, k));
    REQUIRE(p.mid >= p.chord - 1e-12);
  }
}

TEST_CASE("quotient bounds report") {
  // n = 2, k = 2, l = 0: the combinatorial constant is 1/4
  CHECK(ratio_combinatorial_constant(2, 2, 0) == doctest::Approx(0.25).epsilon(1e-15));

  // the identity Hessian with the example coefficients satisfies the equation
  const RatioBoundsReport on = ratio_bounds_check(SymMat::identity(2), CoeffSample{0.5, 0.25});
  CHECK(on.on_shell);
  CHECK(on.pass);

  // off-shell: checks are skipped, not failed
  const RatioBoundsReport off = ratio_bounds_check(SymMat::identity(2), CoeffSample{0.5, 1.0});
  CHECK_FALSE(off.on_shell);
  CHECK(off.detail == "not-on-shell");

  CHECK_THROWS_AS(ratio_bounds_check(SymMat::diagonal(std::vector<double>{-1, -1}),
                                     CoeffSample{0.5, 0.25}),
                  NotAdmissibleError);
}
