#pragma once

#include <array>
#include <span>

namespace mhn {

// Eigenvalue tuples are capped at n = 8: the incremental recurrence stays
// well below 1e-12 relative error at this size and the PDE solve itself only
// uses n = 2, 3.
inline constexpr int kMaxEigs = 8;

/// Exact binomial coefficient C(n, m) for 0 <= m <= n.
long long binomial(int n, int m);

/// Elementary symmetric function sigma_m(lam).
/// sigma_0 = 1; m < 0 and m > n both give 0 (empty sum).
double sigma(int m, std::span<const double> lam);

/// sigma_0..sigma_n in one pass (entries above n are zero).
std::array<double, kMaxEigs + 1> sigma_all(std::span<const double> lam);

/// sigma_m(lam | i): sigma_m with entry i set to zero. 0-based index.
double sigma_del1(int m, std::span<const double> lam, int i);

/// sigma_m(lam | ij): sigma_m with entries i and j set to zero. Requires i != j.
double sigma_del2(int m, std::span<const double> lam, int i, int j);

/// All deleted functions sigma_0..sigma_n(lam | i) in one pass.
std::array<double, kMaxEigs + 1> sigma_all_del1(std::span<const double> lam, int i);

/// Garding cone membership: sigma_i(lam) > 0 strictly for all 1 <= i <= k.
bool in_cone(std::span<const double> lam, int k);

/// Cone test with a safety margin: sigma_i(lam) > tau for 1 <= i <= k.
/// The solver's line search uses tau > 0; tau = 0 recovers in_cone.
bool in_cone_tol(std::span<const double> lam, int k, double tau);

struct RatioPair {
  double lhs;
  double rhs;
};

/// Both sides of the generalized Newton-MacLaurin inequality
///   [ (sigma_m/C_n^m) / (sigma_l/C_n^l) ]^{1/(m-l)}
///     <= [ (sigma_r/C_n^r) / (sigma_s/C_n^s) ]^{1/(r-s)}
/// valid for lam in Gamma_m with m > l >= 0, r > s >= 0, m >= r, l >= s.
/// The caller asserts lhs <= rhs; precondition violations throw.
RatioPair newton_maclaurin_ratio(std::span<const double> lam, int m, int l, int r, int s);

}  // namespace mhn
