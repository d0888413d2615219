#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mhn/expr.hpp"
#include "mhn/hessop.hpp"

namespace mhn {

/// Strictly convex planar domain from a parametrized family. The disk and
/// the ellipse have closed-form curvature extrema; the superellipse
/// |x/a|^p + |y/b|^p = 1 (p >= 2) gets them by a sampled line search, and
/// for p > 2 its curvature degenerates to zero at the axis points.
struct DomainSpec {
  enum class Kind { Disk, Ellipse, Superellipse };

  Kind kind = Kind::Disk;
  double a = 1.0;  // disk radius, or x semi-axis
  double b = 1.0;  // y semi-axis
  double p = 2.0;  // superellipse exponent
  Point center{0.0, 0.0};

  static DomainSpec disk(double radius, Point c = {});
  static DomainSpec ellipse(double a, double b, Point c = {});
  static DomainSpec superellipse(double a, double b, double p, Point c = {});

  void validate() const;

  bool inside(Point q) const;  // strictly inside
  double level(Point q) const; // < 0 inside, 0 on the boundary
  Point boundary_point(double theta) const;
  Point closest_boundary_point(Point q) const;
  Point outward_normal(Point boundary_pt) const;
  double curvature(double theta) const;
  double kappa_min() const;
  double kappa_max() const;
  double diameter() const;
  std::array<double, 4> bbox() const;  // xmin, xmax, ymin, ymax
};

enum class NodeClass : unsigned char { Exterior = 0, Interior = 1, Band = 2 };

struct InteriorNode {
  int ix = 0, iy = 0;
  int active = -1;
};

/// A node of the boundary band: inside the domain but with part of its
/// 9-point stencil outside. It carries the Neumann closure: linear forms in
/// u giving the outward normal derivative and the value of u at the node's
/// closest boundary point, both second order. weights_ok goes false when the
/// one-sided ray into the interior could not be built at this spacing.
struct BandNode {
  int ix = 0, iy = 0;
  int active = -1;
  Point node;
  Point bpoint;
  Point normal;
  double dist = 0;  // distance from the node to bpoint, >= 0 inside
  bool weights_ok = false;
  std::vector<std::pair<int, double>> dnu;   // D_nu u at bpoint
  std::vector<std::pair<int, double>> uval;  // u at bpoint
};

class Grid {
 public:
  const DomainSpec& domain() const { return spec_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Point origin() const { return {x0_, y0_}; }
  Point node_point(int ix, int iy) const { return {x0_ + ix * h_, y0_ + iy * h_}; }

  NodeClass node_class(int ix, int iy) const;
  int active_index(int ix, int iy) const;  // -1 for exterior nodes
  int n_active() const { return n_active_; }

  const std::vector<InteriorNode>& interior() const { return interior_; }
  const std::vector<BandNode>& band() const { return band_; }
  bool closure_ok() const;

  /// O(h^2) finite-difference Hessian at an interior node; exact for
  /// quadratics (central second differences, 4-point cross for u_xy).
  SymMat hessian_at(std::span<const double> u, const InteriorNode& nd) const;
  Point gradient_at(std::span<const double> u, const InteriorNode& nd) const;

  /// Active-node coordinates plus a ring of boundary samples; the point set
  /// positivity scans run over.
  std::vector<Point> scan_points() const;
  std::vector<Point> boundary_samples(int count) const;

  /// Structured text dump of the classification (one node per line).
  void dump(std::ostream& os) const;

 private:
  DomainSpec spec_;
  double h_ = 0;
  double x0_ = 0, y0_ = 0;
  int nx_ = 0, ny_ = 0;
  int n_active_ = 0;
  std::vector<NodeClass> cls_;
  std::vector<int> active_;
  std::vector<InteriorNode> interior_;
  std::vector<BandNode> band_;

  friend Grid build_grid(const DomainSpec& spec, double h);
};

/// Classify the nodes of a uniform Cartesian grid over the padded bounding
/// box and attach boundary geometry plus the Neumann closure to the band.
/// Throws GridError when the box spans fewer than four cells; solver-grade
/// resolution (>= 16 nodes across the diameter) is enforced at config
/// ingestion, not here, so coarse classification-only grids stay usable.
Grid build_grid(const DomainSpec& spec, double h);

struct BoundaryMode {
  bool use_eps = true;  // residual = D_nu u - (-eps u + phi)
  double value = 0.0;   // eps, or the constant c when use_eps is false

  static BoundaryMode eps(double e) { return {true, e}; }
  static BoundaryMode fixed_c(double c) { return {false, c}; }
};

/// Neumann residual at one band node with phi pre-evaluated at the node's
/// closest boundary point. Throws GridError when the node's closure failed.
double neumann_residual(const Grid& g, std::span<const double> u, const BandNode& bn,
                        BoundaryMode mode, double phi_at_bpoint);

}  // namespace mhn
