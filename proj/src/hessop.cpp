#include "mhn/hessop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

void require_dim(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("SymMat: dimension must be 2 or 3");
}

// Flip an eigenvector so its first component of noticeable size is positive.
void orient(double* v, int n) {
  for (int i = 0; i < n; ++i) {
    if (std::abs(v[i]) > 1e-14) {
      if (v[i] < 0)
        for (int j = 0; j < n; ++j) v[j] = -v[j];
      return;
    }
  }
}

}  // namespace

SymMat::SymMat(int n) : n_(n) { require_dim(n); }

int SymMat::tri(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) throw std::out_of_range("SymMat: index out of range");
  // upper triangle, row major: n=2 -> (00,01,11), n=3 -> (00,01,02,11,12,22)
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

SymMat SymMat::identity(int n) {
  SymMat m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMat SymMat::diagonal(std::span<const double> d) {
  SymMat m(int(d.size()));
  for (int i = 0; i < int(d.size()); ++i) m.set(i, i, d[i]);
  return m;
}

bool SymMat::finite() const {
  for (int i = 0; i < n_ * (n_ + 1) / 2; ++i)
    if (!std::isfinite(s_[i])) return false;
  return true;
}

SymMat SymMat::scaled(double f) const {
  SymMat m = *this;
  for (auto& v : m.s_) v *= f;
  return m;
}

SymMat SymMat::plus(const SymMat& other) const {
  if (other.n_ != n_) throw std::invalid_argument("SymMat: dimension mismatch");
  SymMat m = *this;
  for (int i = 0; i < 6; ++i) m.s_[i] += other.s_[i];
  return m;
}

Spectral spectral(const SymMat& w) {
  const int n = w.dim();
  require_dim(n);
  if (!w.finite()) throw std::invalid_argument("spectral: non-finite entries");

  Spectral out;
  out.n = n;

  if (n == 2) {
    const double a = w(0, 0), b = w(0, 1), c = w(1, 1);
    const double mean = 0.5 * (a + c);
    const double delta = 0.5 * (a - c);
    const double rad = std::hypot(delta, b);
    out.lam[0] = mean + rad;
    out.lam[1] = mean - rad;
    double v0[2], v1[2];
    if (rad == 0.0 || b == 0.0) {
      // already diagonal (or a multiple of the identity)
      if (a >= c) {
        v0[0] = 1; v0[1] = 0; v1[0] = 0; v1[1] = 1;
      } else {
        v0[0] = 0; v0[1] = 1; v1[0] = 1; v1[1] = 0;
      }
    } else {
      // pick the better-conditioned of the two analytic eigenvector forms
      if (delta >= 0) {
        v0[0] = delta + rad; v0[1] = b;
      } else {
        v0[0] = b; v0[1] = rad - delta;
      }
      const double nrm = std::hypot(v0[0], v0[1]);
      v0[0] /= nrm; v0[1] /= nrm;
      v1[0] = -v0[1]; v1[1] = v0[0];
    }
    orient(v0, 2);
    orient(v1, 2);
    out.q = {v0[0], v0[1], 0, v1[0], v1[1], 0, 0, 0, 0};
    return out;
  }

  // n == 3: cyclic Jacobi sweeps
  double a[3][3] = {{w(0, 0), w(0, 1), w(0, 2)},
                    {w(0, 1), w(1, 1), w(1, 2)},
                    {w(0, 2), w(1, 2), w(2, 2)}};
  double q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off2 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off2 < 1e-26) break;
    static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pr : pairs) {
      const int p = pr[0], r = pr[1];
      const double apr = a[p][r];
      if (std::abs(apr) < 1e-300) continue;
      const double tau = (a[r][r] - a[p][p]) / (2.0 * apr);
      const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      for (int i = 0; i < 3; ++i) {
        const double aip = a[i][p], air = a[i][r];
        a[i][p] = c * aip - s * air;
        a[i][r] = s * aip + c * air;
      }
      for (int i = 0; i < 3; ++i) {
        const double api = a[p][i], ari = a[r][i];
        a[p][i] = c * api - s * ari;
        a[r][i] = s * api + c * ari;
      }
      for (int i = 0; i < 3; ++i) {
        const double qip = q[i][p], qir = q[i][r];
        q[i][p] = c * qip - s * qir;
        q[i][r] = s * qip + c * qir;
      }
    }
  }
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](int i, int j) { return a[i][i] > a[j][j]; });
  for (int col = 0; col < 3; ++col) {
    const int src = order[col];
    out.lam[col] = a[src][src];
    double v[3] = {q[0][src], q[1][src], q[2][src]};
    orient(v, 3);
    out.q[0 + 3 * col] = v[0];
    out.q[1 + 3 * col] = v[1];
    out.q[2 + 3 * col] = v[2];
  }
  return out;
}

CoeffSample::CoeffSample(std::initializer_list<double> v) : CoeffSample(std::vector<double>(v)) {}

CoeffSample::CoeffSample(std::vector<double> v) : a(std::move(v)) {
  if (a.size() < 2) throw std::invalid_argument("CoeffSample: need k >= 2 coefficients");
  for (double x : a)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("CoeffSample: every alpha_l must be strictly positive");
}

std::array<double, kMaxEigs> g_dlambda(std::span<const double> lam, const CoeffSample& alpha) {
  const int n = int(lam.size());
  const int k = alpha.k();
  if (k > n) throw std::invalid_argument("g_dlambda: need k <= n");
  if (!in_cone(lam, k)) throw NotAdmissibleError("g_dlambda: lam not in Gamma_k");

  const auto e = sigma_all(lam);
  const double sk = e[k];
  const double skm1 = e[k - 1];
  const double denom = skm1 * skm1;

  std::array<double, kMaxEigs> d{};
  for (int i = 0; i < n; ++i) {
    const auto ei = sigma_all_del1(lam, i);
    // d/dlam_i (sigma_k/sigma_{k-1}) via dsigma_m/dlam_i = sigma_{m-1}(lam|i)
    double acc = (ei[k - 1] * skm1 - sk * ei[k - 2]) / denom;
    for (int l = 0; l <= k - 2; ++l) {
      const double slm1_i = (l >= 1) ? ei[l - 1] : 0.0;  // sigma_{-1} == 0
      acc -= alpha.a[l] * (slm1_i * skm1 - e[l] * ei[k - 2]) / denom;
    }
    d[i] = acc;
  }
  return d;
}

OperatorValue g_eval(const SymMat& w, const CoeffSample& alpha) {
  const int n = w.dim();
  const int k = alpha.k();
  if (k > n) throw std::invalid_argument("g_eval: need k <= n");
  const Spectral sp = spectral(w);
  if (!in_cone(sp.eigs(), k)) throw NotAdmissibleError("g_eval: lam(W) not in Gamma_k");

  const auto e = sigma_all(sp.eigs());
  OperatorValue out;
  out.gk = e[k] / e[k - 1];
  out.gl.resize(std::size_t(k - 1));
  out.g = out.gk;
  for (int l = 0; l <= k - 2; ++l) {
    out.gl[l] = e[l] / e[k - 1];
    out.g -= alpha.a[l] * out.gl[l];
  }

  const auto d = g_dlambda(sp.eigs(), alpha);
  // A diagonal dG/dlam that fails to be positive means the iterate is
  // numerically outside the ellipticity region; report it like a cone exit
  // so line searches back off instead of continuing on garbage.
  for (int i = 0; i < n; ++i)
    if (!(d[i] > 0.0)) throw NotAdmissibleError("g_eval: ellipticity lost (dG/dlambda <= 0)");

  // rotate diag(dG/dlam) back: grad = Q diag(d) Q^T
  out.grad = SymMat(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0;
      for (int t = 0; t < n; ++t) v += d[t] * sp.qv(i, t) * sp.qv(j, t);
      out.grad.set(i, j, v);
    }
  return out;
}

double g_value(const SymMat& w, const CoeffSample& alpha) {
  const int n = w.dim();
  const int k = alpha.k();
  if (k > n) throw std::invalid_argument("g_value: need k <= n");
  const Spectral sp = spectral(w);
  if (!in_cone(sp.eigs(), k)) throw NotAdmissibleError("g_value: lam(W) not in Gamma_k");
  const auto e = sigma_all(sp.eigs());
  double g = e[k] / e[k - 1];
  for (int l = 0; l <= k - 2; ++l) g -= alpha.a[l] * e[l] / e[k - 1];
  return g;
}

SymMat g_gradient(const SymMat& w, const CoeffSample& alpha) { return g_eval(w, alpha).grad; }

TraceBounds trace_bounds_check(const SymMat& w, const CoeffSample& alpha) {
  const int n = w.dim();
  const int k = alpha.k();
  const Spectral sp = spectral(w);
  const auto d = g_dlambda(sp.eigs(), alpha);
  TraceBounds tb{};
  for (int i = 0; i < n; ++i) tb.trace += d[i];
  tb.lower = double(n - k + 1) / double(k);
  tb.upper = double(n - k + 1);
  return tb;
}

DerivativeBound min_eig_derivative_check(std::span<const double> lam, const CoeffSample& alpha,
                                         MinEigMode mode, double delta, double eps) {
  const int n = int(lam.size());
  const int k = alpha.k();
  if (k > n) throw std::invalid_argument("min_eig_derivative_check: need k <= n");

  double bound = 0;
  if (mode == MinEigMode::NegativeLambda1) {
    if (!(lam[0] < 0.0))
      throw std::invalid_argument("min_eig_derivative_check: NegativeLambda1 needs lam_1 < 0");
    bound = (double(n) / double(k)) / double((n - k + 2) * (n - k + 2));
  } else {
    if (n < 3) throw std::invalid_argument("min_eig_derivative_check: Pinch needs n >= 3");
    if (!(delta > 0.0 && eps > 0.0))
      throw std::invalid_argument("min_eig_derivative_check: Pinch needs delta, eps > 0");
    for (int i = 2; i < n; ++i)
      if (!(lam[i - 1] >= lam[i]))
        throw std::invalid_argument("min_eig_derivative_check: entries 2..n must be sorted descending");
    if (!(lam[0] > 0.0 && lam[n - 1] < 0.0))
      throw std::invalid_argument("min_eig_derivative_check: Pinch needs lam_1 > 0 > lam_n");
    if (!(lam[0] >= delta * lam[1]))
      throw std::invalid_argument("min_eig_derivative_check: Pinch needs lam_1 >= delta*lam_2");
    if (!(-lam[n - 1] >= eps * lam[0]))
      throw std::invalid_argument("min_eig_derivative_check: Pinch needs -lam_n >= eps*lam_1");
    const double c1 = std::min(eps * eps * delta * delta / (2.0 * (n - 2) * (n - 1)),
                               eps * eps * delta / (4.0 * (n - 1)));
    bound = (double(n) / double(k)) * c1 * c1 / double((n - k + 2) * (n - k + 2));
  }

  const auto d = g_dlambda(lam, alpha);  // throws NotAdmissible outside Gamma_k
  double trace = 0;
  for (int i = 0; i < n; ++i) trace += d[i];
  return {d[0], bound * trace};
}

ConcavityProbe concavity_probe(const SymMat& w1, const SymMat& w2, const CoeffSample& alpha) {
  if (w1.dim() != w2.dim()) throw std::invalid_argument("concavity_probe: dimension mismatch");
  const SymMat mid = w1.plus(w2).scaled(0.5);
  ConcavityProbe out{};
  out.chord = 0.5 * (g_value(w1, alpha) + g_value(w2, alpha));
  out.mid = g_value(mid, alpha);
  return out;
}

double ratio_combinatorial_constant(int n, int k, int l) {
  if (!(0 <= l && l <= k - 2 && 2 <= k && k <= n))
    throw std::invalid_argument("ratio_combinatorial_constant: need 0 <= l <= k-2 <= n-2");
  return std::pow(double(binomial(n, k)), double(k - 1 - l)) * double(binomial(n, l)) /
         std::pow(double(binomial(n, k - 1)), double(k - l));
}

RatioBoundsReport ratio_bounds_check(const SymMat& w, const CoeffSample& alpha, double pde_tol) {
  const int n = w.dim();
  const int k = alpha.k();
  const Spectral sp = spectral(w);
  if (!in_cone(sp.eigs(), k)) throw NotAdmissibleError("ratio_bounds_check: lam(W) not in Gamma_k");

  const auto e = sigma_all(sp.eigs());
  RatioBoundsReport rep;
  rep.gk = e[k] / e[k - 1];

  double g = rep.gk;
  for (int l = 0; l <= k - 2; ++l) g -= alpha.a[l] * e[l] / e[k - 1];
  if (std::abs(g - alpha.a[k - 1]) > pde_tol) {
    rep.on_shell = false;
    rep.pass = false;
    rep.detail = "not-on-shell";
    return rep;
  }
  rep.on_shell = true;

  const double slack = 1e-9;  // roundoff headroom on the inequalities
  rep.pass = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  char buf[160];

  double max_const = 1.0;
  for (int l = 0; l <= k - 2; ++l) {
    const double ratio = e[l] / e[k - 1];
    const double cc = ratio_combinatorial_constant(n, k, l);
    max_const = std::max(max_const, cc);
    double margin;
    if (rep.gk <= 1.0) {
      margin = 1.0 - alpha.a[l] * ratio;  // alpha_l sigma_l/sigma_{k-1} <= 1
    } else {
      margin = cc - ratio;  // sigma_l/sigma_{k-1} <= combinatorial constant
    }
    if (margin < rep.worst_margin) rep.worst_margin = margin;
    if (margin < -slack) {
      rep.pass = false;
      std::snprintf(buf, sizeof buf, "quotient bound violated at l=%d: margin %.3e", l, margin);
      rep.detail = buf;
      return rep;
    }
  }

  // 0 < alpha_{k-1} <= sigma_k/sigma_{k-1} <= max(1, max_l const) * sum alpha_l
  double sum_alpha = 0;
  for (double x : alpha.a) sum_alpha += x;
  const double lower_margin = rep.gk - alpha.a[k - 1];
  const double upper_margin = (rep.gk <= 1.0) ? (1.0 - rep.gk) : (max_const * sum_alpha - rep.gk);
  rep.worst_margin = std::min({rep.worst_margin, lower_margin, upper_margin});
  if (lower_margin < -slack || upper_margin < -slack) {
    rep.pass = false;
    std::snprintf(buf, sizeof buf, "sigma_k/sigma_{k-1} bound violated: lower margin %.3e, upper margin %.3e",
                  lower_margin, upper_margin);
    rep.detail = buf;
    return rep;
  }
  std::snprintf(buf, sizeof buf, "ok: gk=%.6g worst margin %.3e", rep.gk, rep.worst_margin);
  rep.detail = buf;
  return rep;
}

}  // namespace mhn
