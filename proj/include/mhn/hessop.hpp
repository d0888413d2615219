#pragma once

#include <array>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mhn/symfun.hpp"

namespace mhn {

/// Dense symmetric matrix with n in {2, 3}; upper-triangle storage.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int n);
  static SymMat identity(int n);
  static SymMat diagonal(std::span<const double> d);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return s_[tri(i, j)]; }
  void set(int i, int j, double v) { s_[tri(i, j)] = v; }
  bool finite() const;

  SymMat scaled(double f) const;
  SymMat plus(const SymMat& other) const;

 private:
  int tri(int i, int j) const;
  int n_ = 0;
  std::array<double, 6> s_{};
};

/// W = Q diag(lam) Q^T with eigenvalues sorted descending and each
/// eigenvector column oriented so its first nonzero component is positive.
struct Spectral {
  int n = 0;
  std::array<double, 3> lam{};
  std::array<double, 9> q{};  // column-major

  std::span<const double> eigs() const { return {lam.data(), std::size_t(n)}; }
  double qv(int row, int col) const { return q[row + 3 * col]; }
};

/// Closed form for n = 2, cyclic Jacobi for n = 3 (off-diagonal Frobenius
/// norm driven below 1e-13).
Spectral spectral(const SymMat& w);

/// Coefficient data alpha_0..alpha_{k-1} at one point; every entry must be
/// strictly positive and k >= 2.
struct CoeffSample {
  std::vector<double> a;

  CoeffSample() = default;
  CoeffSample(std::initializer_list<double> v);
  explicit CoeffSample(std::vector<double> v);
  int k() const { return int(a.size()); }
};

struct OperatorValue {
  double g = 0;            // G(W, x)
  SymMat grad;             // G^{ij} = dG/dW_ij
  double gk = 0;           // sigma_k / sigma_{k-1}
  std::vector<double> gl;  // sigma_l / sigma_{k-1}, l = 0..k-2
};

/// dG/dlambda_i of
///   G(lam) = sigma_k/sigma_{k-1} - sum_{l=0}^{k-2} alpha_l sigma_l/sigma_{k-1}
/// for lam in Gamma_k (throws NotAdmissibleError otherwise). Valid for any
/// tuple size up to kMaxEigs. Entries beyond lam.size() are zero.
std::array<double, kMaxEigs> g_dlambda(std::span<const double> lam, const CoeffSample& alpha);

/// Value, matrix derivative and quotient diagnostics of G at one point.
/// The PDE residual at the point is g_eval(...).g - alpha_{k-1}.
OperatorValue g_eval(const SymMat& w, const CoeffSample& alpha);
double g_value(const SymMat& w, const CoeffSample& alpha);
SymMat g_gradient(const SymMat& w, const CoeffSample& alpha);

struct TraceBounds {
  double trace;
  double lower;  // (n-k+1)/k
  double upper;  // n-k+1, the bound the proof concludes
};

/// Returns (sum_i dG/dlambda_i, (n-k+1)/k, n-k+1). Callers assert
/// lower <= trace < upper on states that satisfy the equation.
TraceBounds trace_bounds_check(const SymMat& w, const CoeffSample& alpha);

enum class MinEigMode { NegativeLambda1, Pinch };

struct DerivativeBound {
  double lhs;  // dG/dlambda_1 (first entry distinguished)
  double rhs;  // bound * sum_i dG/dlambda_i
};

/// Minimal-eigenvalue derivative inequalities. NegativeLambda1 requires
/// lam in Gamma_k with lam_1 < 0 and uses bound (n/k)/(n-k+2)^2. Pinch
/// requires n >= 3, entries 2..n sorted descending, lam_1 > 0 > lam_n,
/// lam_1 >= delta*lam_2 and -lam_n >= eps*lam_1, and uses
/// c_2 = (n/k) c_1^2/(n-k+2)^2 with
/// c_1 = min{eps^2 delta^2 / (2(n-2)(n-1)), eps^2 delta / (4(n-1))}.
/// The caller asserts lhs >= rhs.
DerivativeBound min_eig_derivative_check(std::span<const double> lam, const CoeffSample& alpha,
                                         MinEigMode mode, double delta = 0.0, double eps = 0.0);

struct ConcavityProbe {
  double mid;    // G((W1+W2)/2)
  double chord;  // (G(W1) + G(W2)) / 2
};

/// Midpoint concavity probe; Gamma_k is convex so the midpoint is admissible.
/// The caller asserts mid >= chord.
ConcavityProbe concavity_probe(const SymMat& w1, const SymMat& w2, const CoeffSample& alpha);

/// (C_n^k)^{k-1-l} C_n^l / (C_n^{k-1})^{k-l}
double ratio_combinatorial_constant(int n, int k, int l);

struct RatioBoundsReport {
  bool on_shell = false;  // quotient bounds are conditional on the equation
  bool pass = false;
  double gk = 0;            // sigma_k / sigma_{k-1}
  double worst_margin = 0;  // min over checks of (bound - value)
  std::string detail;
};

/// Quotient bounds at a point where the PDE holds (|g - alpha_{k-1}| <= pde_tol).
/// Off-shell points come back with on_shell = false and the checks skipped.
/// The case split follows the size of sigma_k/sigma_{k-1}: at or below 1 each
/// alpha_l sigma_l/sigma_{k-1} is checked against 1; above 1 each
/// sigma_l/sigma_{k-1} is checked against the combinatorial constant, and
/// sigma_k/sigma_{k-1} itself against max(1, max_l const) * sum_l alpha_l.
RatioBoundsReport ratio_bounds_check(const SymMat& w, const CoeffSample& alpha, double pde_tol = 1e-8);

}  // namespace mhn
