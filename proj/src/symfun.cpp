#include "mhn/symfun.hpp"

#include <cmath>
#include <stdexcept>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

void check_tuple(std::span<const double> lam) {
  if (lam.empty() || lam.size() > std::size_t(kMaxEigs))
    throw std::invalid_argument("eigenvalue tuple must have between 1 and 8 entries");
  for (double v : lam)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite eigenvalue entry");
}

}  // namespace

long long binomial(int n, int m) {
  if (m < 0 || m > n) throw std::invalid_argument("binomial: need 0 <= m <= n");
  if (m > n - m) m = n - m;
  long long c = 1;
  for (int i = 1; i <= m; ++i) c = c * (n - m + i) / i;
  return c;
}

std::array<double, kMaxEigs + 1> sigma_all(std::span<const double> lam) {
  check_tuple(lam);
  std::array<double, kMaxEigs + 1> e{};
  e[0] = 1.0;
  int used = 0;
  for (double v : lam) {
    ++used;
    // e_j(lam_1..lam_t) = e_j(lam_1..lam_{t-1}) + lam_t * e_{j-1}(lam_1..lam_{t-1}),
    // updated in place from the top down.
    for (int j = used; j >= 1; --j) e[j] += v * e[j - 1];
  }
  return e;
}

double sigma(int m, std::span<const double> lam) {
  check_tuple(lam);
  if (m < 0 || m > int(lam.size())) return 0.0;
  if (m == 0) return 1.0;
  return sigma_all(lam)[m];
}

std::array<double, kMaxEigs + 1> sigma_all_del1(std::span<const double> lam, int i) {
  check_tuple(lam);
  if (i < 0 || i >= int(lam.size())) throw std::invalid_argument("sigma_del1: index out of range");
  std::array<double, kMaxEigs + 1> e{};
  e[0] = 1.0;
  int used = 0;
  for (int j = 0; j < int(lam.size()); ++j) {
    if (j == i) continue;
    ++used;
    for (int t = used; t >= 1; --t) e[t] += lam[j] * e[t - 1];
  }
  return e;
}

double sigma_del1(int m, std::span<const double> lam, int i) {
  if (i < 0 || i >= int(lam.size())) throw std::invalid_argument("sigma_del1: index out of range");
  check_tuple(lam);
  if (m < 0 || m > int(lam.size())) return 0.0;
  if (m == 0) return 1.0;
  return sigma_all_del1(lam, i)[m];
}

double sigma_del2(int m, std::span<const double> lam, int i, int j) {
  check_tuple(lam);
  const int n = int(lam.size());
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::invalid_argument("sigma_del2: index out of range");
  if (i == j) throw std::invalid_argument("sigma_del2: indices must differ");
  if (m < 0 || m > n) return 0.0;
  if (m == 0) return 1.0;
  std::array<double, kMaxEigs + 1> e{};
  e[0] = 1.0;
  int used = 0;
  for (int t = 0; t < n; ++t) {
    if (t == i || t == j) continue;
    ++used;
    for (int s = used; s >= 1; --s) e[s] += lam[t] * e[s - 1];
  }
  return e[m];
}

bool in_cone(std::span<const double> lam, int k) { return in_cone_tol(lam, k, 0.0); }

bool in_cone_tol(std::span<const double> lam, int k, double tau) {
  check_tuple(lam);
  if (k < 1 || k > int(lam.size())) throw std::invalid_argument("in_cone: need 1 <= k <= n");
  if (!(tau >= 0.0)) throw std::invalid_argument("in_cone_tol: slack must be >= 0");
  const auto e = sigma_all(lam);
  for (int i = 1; i <= k; ++i)
    if (!(e[i] > tau)) return false;
  return true;
}

RatioPair newton_maclaurin_ratio(std::span<const double> lam, int m, int l, int r, int s) {
  const int n = int(lam.size());
  if (!(m > l && l >= 0 && r > s && s >= 0 && m >= r && l >= s && m <= n))
    throw std::invalid_argument("newton_maclaurin_ratio: index tuple violates m > l >= 0, r > s >= 0, m >= r, l >= s");
  if (!in_cone(lam, m)) throw NotAdmissibleError("newton_maclaurin_ratio: lam not in Gamma_m");
  const auto e = sigma_all(lam);
  auto normalized = [&](int t) { return e[t] / double(binomial(n, t)); };
  RatioPair out{};
  out.lhs = std::pow(normalized(m) / normalized(l), 1.0 / double(m - l));
  out.rhs = std::pow(normalized(r) / normalized(s), 1.0 / double(r - s));
  return out;
}

}  // namespace mhn
