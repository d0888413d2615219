#include "mhn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

// Golden-section minimization of f over [lo, hi]; deterministic.
template <class F>
double golden_min(F&& f, double lo, double hi, int iters = 80) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DomainSpec DomainSpec::disk(double radius, Point c) {
  DomainSpec s;
  s.kind = Kind::Disk;
  s.a = s.b = radius;
  s.center = c;
  s.validate();
  return s;
}

DomainSpec DomainSpec::ellipse(double a, double b, Point c) {
  DomainSpec s;
  s.kind = Kind::Ellipse;
  s.a = a;
  s.b = b;
  s.center = c;
  s.validate();
  return s;
}

DomainSpec DomainSpec::superellipse(double a, double b, double p, Point c) {
  DomainSpec s;
  s.kind = Kind::Superellipse;
  s.a = a;
  s.b = b;
  s.p = p;
  s.center = c;
  s.validate();
  return s;
}

void DomainSpec::validate() const {
  if (!(a > 0) || !(b > 0)) throw ConfigError("domain: semi-axes must be positive");
  if (kind == Kind::Superellipse && !(p >= 2.0))
    throw ConfigError("domain: superellipse exponent must be >= 2");
}

double DomainSpec::level(Point q) const {
  const double dx = q.x - center.x, dy = q.y - center.y;
  switch (kind) {
    case Kind::Disk:
      return std::hypot(dx, dy) - a;
    case Kind::Ellipse:
      return (dx / a) * (dx / a) + (dy / b) * (dy / b) - 1.0;
    case Kind::Superellipse:
      return std::pow(std::abs(dx / a), p) + std::pow(std::abs(dy / b), p) - 1.0;
  }
  return 0.0;
}

bool DomainSpec::inside(Point q) const { return level(q) < 0.0; }

Point DomainSpec::boundary_point(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  switch (kind) {
    case Kind::Disk:
      return {center.x + a * c, center.y + a * s};
    case Kind::Ellipse:
      return {center.x + a * c, center.y + b * s};
    case Kind::Superellipse: {
      const double m = 2.0 / p;
      return {center.x + a * sgn(c) * std::pow(std::abs(c), m),
              center.y + b * sgn(s) * std::pow(std::abs(s), m)};
    }
  }
  return center;
}

Point DomainSpec::closest_boundary_point(Point q) const {
  if (kind == Kind::Disk) {
    const double dx = q.x - center.x, dy = q.y - center.y;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) return {center.x + a, center.y};
    return {center.x + a * dx / r, center.y + a * dy / r};
  }
  auto dist2 = [&](double t) {
    const Point bp = boundary_point(t);
    const double ex = bp.x - q.x, ey = bp.y - q.y;
    return ex * ex + ey * ey;
  };
  // parametrization derivative (singular at the axis points when p > 2,
  // which the Newton polish guards against)
  auto velocity = [&](double t) -> Point {
    const double c = std::cos(t), s = std::sin(t);
    if (kind == Kind::Ellipse) return {-a * s, b * c};
    const double m = 2.0 / p;
    return {-a * m * std::pow(std::abs(c), m - 1.0) * s,
            b * m * std::pow(std::abs(s), m - 1.0) * c};
  };

  // coarse scan, golden refinement, then Newton on (p(t)-q).p'(t) = 0
  const int samples = 2048;
  int best = 0;
  double best_val = dist2(0.0);
  for (int i = 1; i < samples; ++i) {
    const double v = dist2(kTwoPi * i / samples);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = kTwoPi * (best - 1) / samples;
  const double hi = kTwoPi * (best + 1) / samples;
  double t = golden_min(dist2, lo, hi, 40);
  for (int it = 0; it < 30; ++it) {
    const Point bp = boundary_point(t);
    const Point v = velocity(t);
    const double g = (bp.x - q.x) * v.x + (bp.y - q.y) * v.y;
    const double dt = 1e-7;
    const Point bp1 = boundary_point(t + dt), v1 = velocity(t + dt);
    const double g1 = (bp1.x - q.x) * v1.x + (bp1.y - q.y) * v1.y;
    const double dg = (g1 - g) / dt;
    if (!std::isfinite(dg) || std::abs(dg) < 1e-300) break;
    const double step = g / dg;
    if (!std::isfinite(step) || std::abs(step) > (hi - lo)) break;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  if (!(dist2(t) <= best_val + 1e-15)) t = golden_min(dist2, lo, hi, 90);
  return boundary_point(t);
}

Point DomainSpec::outward_normal(Point bp) const {
  const double dx = bp.x - center.x, dy = bp.y - center.y;
  double gx, gy;
  switch (kind) {
    case Kind::Disk: {
      const double r = std::hypot(dx, dy);
      return {dx / r, dy / r};
    }
    case Kind::Ellipse:
      gx = 2.0 * dx / (a * a);
      gy = 2.0 * dy / (b * b);
      break;
    case Kind::Superellipse:
      gx = (p / a) * std::pow(std::abs(dx / a), p - 1.0) * sgn(dx);
      gy = (p / b) * std::pow(std::abs(dy / b), p - 1.0) * sgn(dy);
      break;
    default:
      gx = gy = 0;
  }
  const double n = std::hypot(gx, gy);
  return {gx / n, gy / n};
}

double DomainSpec::curvature(double theta) const {
  if (kind == Kind::Disk) return 1.0 / a;
  // level-set curvature (Fxx Fy^2 - 2 Fxy Fx Fy + Fyy Fx^2)/|grad F|^3,
  // finite for p >= 2 everywhere on the boundary
  const Point bp = boundary_point(theta);
  const double dx = bp.x - center.x, dy = bp.y - center.y;
  double fx, fy, fxx, fyy;
  if (kind == Kind::Ellipse) {
    fx = 2.0 * dx / (a * a);
    fy = 2.0 * dy / (b * b);
    fxx = 2.0 / (a * a);
    fyy = 2.0 / (b * b);
  } else {
    fx = (p / a) * std::pow(std::abs(dx / a), p - 1.0) * sgn(dx);
    fy = (p / b) * std::pow(std::abs(dy / b), p - 1.0) * sgn(dy);
    fxx = (p * (p - 1.0) / (a * a)) * std::pow(std::abs(dx / a), p - 2.0);
    fyy = (p * (p - 1.0) / (b * b)) * std::pow(std::abs(dy / b), p - 2.0);
  }
  const double grad = std::hypot(fx, fy);
  return (fxx * fy * fy + fyy * fx * fx) / (grad * grad * grad);
}

double DomainSpec::kappa_min() const {
  switch (kind) {
    case Kind::Disk:
      return 1.0 / a;
    case Kind::Ellipse:
      return std::min(b / (a * a), a / (b * b));
    case Kind::Superellipse: {
      if (p == 2.0) return std::min(b / (a * a), a / (b * b));
      // p > 2: curvature vanishes at the axis points
      const int samples = 4096;
      double best = curvature(0.0);
      for (int i = 1; i <= samples; ++i)
        best = std::min(best, curvature(0.5 * std::numbers::pi * i / samples));
      return best;
    }
  }
  return 0.0;
}

double DomainSpec::kappa_max() const {
  switch (kind) {
    case Kind::Disk:
      return 1.0 / a;
    case Kind::Ellipse:
      return std::max(b / (a * a), a / (b * b));
    case Kind::Superellipse: {
      if (p == 2.0) return std::max(b / (a * a), a / (b * b));
      const int samples = 4096;
      double best = curvature(0.0);
      double best_t = 0.0;
      for (int i = 1; i <= samples; ++i) {
        const double t = 0.5 * std::numbers::pi * i / samples;
        const double kappa = curvature(t);
        if (kappa > best) {
          best = kappa;
          best_t = t;
        }
      }
      const double span = 0.5 * std::numbers::pi / samples;
      const double t = golden_min([&](double u) { return -curvature(u); },
                                  std::max(0.0, best_t - span),
                                  std::min(0.5 * std::numbers::pi, best_t + span));
      return std::max(best, curvature(t));
    }
  }
  return 0.0;
}

double DomainSpec::diameter() const { return 2.0 * std::max(a, b); }

std::array<double, 4> DomainSpec::bbox() const {
  return {center.x - a, center.x + a, center.y - b, center.y + b};
}

NodeClass Grid::node_class(int ix, int iy) const {
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return NodeClass::Exterior;
  return cls_[std::size_t(ix) + std::size_t(nx_) * std::size_t(iy)];
}

int Grid::active_index(int ix, int iy) const {
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
  return active_[std::size_t(ix) + std::size_t(nx_) * std::size_t(iy)];
}

bool Grid::closure_ok() const {
  for (const BandNode& bn : band_)
    if (!bn.weights_ok) return false;
  return true;
}

SymMat Grid::hessian_at(std::span<const double> u, const InteriorNode& nd) const {
  const double h2 = h_ * h_;
  auto at = [&](int dx, int dy) { return u[std::size_t(active_index(nd.ix + dx, nd.iy + dy))]; };
  const double uc = at(0, 0);
  SymMat H(2);
  H.set(0, 0, (at(1, 0) - 2.0 * uc + at(-1, 0)) / h2);
  H.set(1, 1, (at(0, 1) - 2.0 * uc + at(0, -1)) / h2);
  H.set(0, 1, (at(1, 1) + at(-1, -1) - at(1, -1) - at(-1, 1)) / (4.0 * h2));
  return H;
}

Point Grid::gradient_at(std::span<const double> u, const InteriorNode& nd) const {
  auto at = [&](int dx, int dy) { return u[std::size_t(active_index(nd.ix + dx, nd.iy + dy))]; };
  return {(at(1, 0) - at(-1, 0)) / (2.0 * h_), (at(0, 1) - at(0, -1)) / (2.0 * h_)};
}

std::vector<Point> Grid::boundary_samples(int count) const {
  std::vector<Point> pts;
  pts.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) pts.push_back(spec_.boundary_point(kTwoPi * i / count));
  return pts;
}

std::vector<Point> Grid::scan_points() const {
  std::vector<Point> pts;
  pts.reserve(std::size_t(n_active_) + 1024);
  for (const InteriorNode& nd : interior_) pts.push_back(node_point(nd.ix, nd.iy));
  for (const BandNode& bn : band_) pts.push_back(bn.node);
  const auto ring = boundary_samples(1024);
  pts.insert(pts.end(), ring.begin(), ring.end());
  return pts;
}

void Grid::dump(std::ostream& os) const {
  os << "# ix iy x y class(0=exterior,1=interior,2=band)\n";
  for (int iy = 0; iy < ny_; ++iy)
    for (int ix = 0; ix < nx_; ++ix) {
      const Point q = node_point(ix, iy);
      os << ix << ' ' << iy << ' ' << q.x << ' ' << q.y << ' '
         << int(node_class(ix, iy)) << '\n';
    }
}

namespace {

// 1D quadratic Lagrange basis on offsets {-1, 0, 1} at local coordinate xi.
std::array<double, 3> lagrange3(double xi) {
  return {0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)};
}

// Biquadratic interpolation of u at pt from a 3x3 patch of active nodes.
// Returns false when no usable patch center exists near pt.
bool biquadratic_weights(const Grid& g, Point pt, std::vector<std::pair<int, double>>& out) {
  const double h = g.h();
  const Point o = g.origin();
  const int cx = int(std::lround((pt.x - o.x) / h));
  const int cy = int(std::lround((pt.y - o.y) / h));

  struct Cand {
    double d2;
    int ox, oy;
  };
  std::vector<Cand> cands;
  for (int oy = -2; oy <= 2; ++oy)
    for (int ox = -2; ox <= 2; ++ox) {
      const Point c = g.node_point(cx + ox, cy + oy);
      const double ddx = c.x - pt.x, ddy = c.y - pt.y;
      cands.push_back({ddx * ddx + ddy * ddy, ox, oy});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) {
    if (l.d2 != r.d2) return l.d2 < r.d2;
    if (l.oy != r.oy) return l.oy < r.oy;
    return l.ox < r.ox;
  });

  for (const Cand& c : cands) {
    const int px = cx + c.ox, py = cy + c.oy;
    const Point pc = g.node_point(px, py);
    const double xi = (pt.x - pc.x) / h;
    const double eta = (pt.y - pc.y) / h;
    if (std::abs(xi) > 1.05 || std::abs(eta) > 1.05) continue;  // stay essentially interpolatory
    bool ok = true;
    for (int dy = -1; dy <= 1 && ok; ++dy)
      for (int dx = -1; dx <= 1 && ok; ++dx)
        if (g.active_index(px + dx, py + dy) < 0) ok = false;
    if (!ok) continue;
    const auto wx = lagrange3(xi);
    const auto wy = lagrange3(eta);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        out.emplace_back(g.active_index(px + dx, py + dy),
                         wx[std::size_t(dx + 1)] * wy[std::size_t(dy + 1)]);
    return true;
  }
  return false;
}

// Lagrange value and first-derivative weights at s = 0 for distinct sample
// abscissae s_0 < ... < s_{N-1}.
template <std::size_t N>
void ray_fit_weights(const std::array<double, N>& s, std::array<double, N>& wval,
                     std::array<double, N>& wder) {
  for (std::size_t j = 0; j < N; ++j) {
    double denom = 1.0;
    std::array<double, N - 1> others{};
    std::size_t t = 0;
    for (std::size_t m = 0; m < N; ++m) {
      if (m == j) continue;
      denom *= s[j] - s[m];
      others[t++] = s[m];
    }
    double val = 1.0;
    for (double o : others) val *= (0.0 - o);
    wval[j] = val / denom;
    // d/ds prod_m (s - s_m) at 0: sum over dropped factors
    double der = 0.0;
    for (std::size_t drop = 0; drop + 1 < N; ++drop) {
      double term = 1.0;
      for (std::size_t m = 0; m + 1 < N; ++m)
        if (m != drop) term *= (0.0 - others[m]);
      der += term;
    }
    wder[j] = der / denom;
  }
}

void build_band_closure(const Grid& g, BandNode& bn) {
  const double h = g.h();
  const double delta = 2.0 * h;
  // cubic fit along the inward normal: the node itself plus three
  // interpolated samples, so the one-sided derivative truncation stays
  // below the interpolation error
  std::array<double, 4> s{};
  for (std::size_t j = 0; j < 4; ++j) s[j] = bn.dist + double(j) * delta;

  std::array<std::vector<std::pair<int, double>>, 4> rep;
  rep[0].emplace_back(bn.active, 1.0);
  for (std::size_t j = 1; j < 4; ++j) {
    const Point pj{bn.bpoint.x - s[j] * bn.normal.x, bn.bpoint.y - s[j] * bn.normal.y};
    if (!biquadratic_weights(g, pj, rep[j])) {
      bn.weights_ok = false;
      return;
    }
  }

  std::array<double, 4> wval{}, wder{};
  ray_fit_weights(s, wval, wder);

  // D_nu u = -du/ds at s = 0 (s measures inward distance from the boundary)
  std::map<int, double> dnu, uval;
  for (std::size_t j = 0; j < 4; ++j)
    for (const auto& [idx, w] : rep[j]) {
      dnu[idx] += -wder[j] * w;
      uval[idx] += wval[j] * w;
    }
  bn.dnu.assign(dnu.begin(), dnu.end());
  bn.uval.assign(uval.begin(), uval.end());
  bn.weights_ok = true;
}

}  // namespace

Grid build_grid(const DomainSpec& spec, double h) {
  spec.validate();
  if (!(h > 0)) throw GridError("build_grid: spacing must be positive");
  const auto bb = spec.bbox();
  if ((bb[1] - bb[0]) / h < 4.0 || (bb[3] - bb[2]) / h < 4.0)
    throw GridError("build_grid: grid too coarse (fewer than 4 cells across the box)");

  Grid g;
  g.spec_ = spec;
  g.h_ = h;
  // pad by two cells so every stencil index stays in range
  g.x0_ = bb[0] - 2.0 * h;
  g.y0_ = bb[2] - 2.0 * h;
  g.nx_ = int(std::ceil((bb[1] + 2.0 * h - g.x0_) / h)) + 1;
  g.ny_ = int(std::ceil((bb[3] + 2.0 * h - g.y0_) / h)) + 1;

  const std::size_t total = std::size_t(g.nx_) * std::size_t(g.ny_);
  std::vector<char> in(total, 0);
  for (int iy = 0; iy < g.ny_; ++iy)
    for (int ix = 0; ix < g.nx_; ++ix)
      in[std::size_t(ix) + std::size_t(g.nx_) * std::size_t(iy)] =
          spec.inside(g.node_point(ix, iy)) ? 1 : 0;

  g.cls_.assign(total, NodeClass::Exterior);
  g.active_.assign(total, -1);
  auto at = [&](int ix, int iy) -> char {
    if (ix < 0 || ix >= g.nx_ || iy < 0 || iy >= g.ny_) return 0;
    return in[std::size_t(ix) + std::size_t(g.nx_) * std::size_t(iy)];
  };

  for (int iy = 0; iy < g.ny_; ++iy)
    for (int ix = 0; ix < g.nx_; ++ix) {
      if (!at(ix, iy)) continue;
      bool full = true;
      for (int dy = -1; dy <= 1 && full; ++dy)
        for (int dx = -1; dx <= 1 && full; ++dx)
          if (!at(ix + dx, iy + dy)) full = false;
      g.cls_[std::size_t(ix) + std::size_t(g.nx_) * std::size_t(iy)] =
          full ? NodeClass::Interior : NodeClass::Band;
    }

  for (int iy = 0; iy < g.ny_; ++iy)
    for (int ix = 0; ix < g.nx_; ++ix) {
      const std::size_t lin = std::size_t(ix) + std::size_t(g.nx_) * std::size_t(iy);
      if (g.cls_[lin] == NodeClass::Exterior) continue;
      g.active_[lin] = g.n_active_++;
      if (g.cls_[lin] == NodeClass::Interior)
        g.interior_.push_back({ix, iy, g.active_[lin]});
      else {
        BandNode bn;
        bn.ix = ix;
        bn.iy = iy;
        bn.active = g.active_[lin];
        bn.node = g.node_point(ix, iy);
        bn.bpoint = spec.closest_boundary_point(bn.node);
        bn.normal = spec.outward_normal(bn.bpoint);
        bn.dist = std::hypot(bn.node.x - bn.bpoint.x, bn.node.y - bn.bpoint.y);
        g.band_.push_back(std::move(bn));
      }
    }

  for (BandNode& bn : g.band_) build_band_closure(g, bn);
  return g;
}

double neumann_residual(const Grid&, std::span<const double> u, const BandNode& bn,
                        BoundaryMode mode, double phi_at_bpoint) {
  if (!bn.weights_ok)
    throw GridError("neumann_residual: grid too coarse near the boundary (no interior ray)");
  double dnu_u = 0, u_b = 0;
  for (const auto& [idx, w] : bn.dnu) dnu_u += w * u[std::size_t(idx)];
  for (const auto& [idx, w] : bn.uval) u_b += w * u[std::size_t(idx)];
  if (mode.use_eps) return dnu_u - (-mode.value * u_b + phi_at_bpoint);
  return dnu_u - (mode.value + phi_at_bpoint);
}

}  // namespace mhn
