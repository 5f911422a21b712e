#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "phk/common.hpp"

namespace phk {

// Exact area of {(x,y) in [x0,x1]x[y0,y1] : (x-cx)^2+(y-cy)^2 <= R^2}.
// Antiderivative of sqrt(R^2-x^2) is (x sqrt(R^2-x^2) + R^2 asin(x/R))/2.
namespace detail {

inline double sqrt_clamped(double v) { return std::sqrt(std::max(0.0, v)); }

inline double circ_antideriv(double x, double R) {
  x = std::clamp(x, -R, R);
  return 0.5 * (x * sqrt_clamped(R * R - x * x) + R * R * std::asin(std::clamp(x / R, -1.0, 1.0)));
}

// integral over [a,b] of min(yt, g(x)) - max(yb, -g(x)) clipped at 0,
// with g(x) = sqrt(R^2-x^2); circle centered at origin.
inline double circle_strip_area(double a, double b, double yb, double yt, double R) {
  if (a >= b || yb >= yt) return 0.0;
  a = std::clamp(a, -R, R);
  b = std::clamp(b, -R, R);
  if (a >= b) return 0.0;
  // breakpoints where g(x) crosses |yb| or |yt|
  std::array<double, 6> bp{a, b, 0, 0, 0, 0};
  int nbp = 2;
  auto add_cross = [&](double y) {
    double y2 = R * R - y * y;
    if (y2 > 0.0) {
      double x = std::sqrt(y2);
      if (-x > a && -x < b) bp[nbp++] = -x;
      if (x > a && x < b) bp[nbp++] = x;
    }
  };
  add_cross(yb);
  add_cross(yt);
  std::sort(bp.begin(), bp.begin() + nbp);
  double area = 0.0;
  for (int s = 0; s + 1 < nbp; ++s) {
    double x0 = bp[s], x1 = bp[s + 1];
    if (x1 - x0 <= 0.0) continue;
    double xm = 0.5 * (x0 + x1);
    double g = sqrt_clamped(R * R - xm * xm);
    double hi = std::min(yt, g);
    double lo = std::max(yb, -g);
    if (hi <= lo) continue;
    // on this segment the active bounds do not switch
    double piece = 0.0;
    if (hi == yt)
      piece += yt * (x1 - x0);
    else
      piece += circ_antideriv(x1, R) - circ_antideriv(x0, R);
    if (lo == yb)
      piece -= yb * (x1 - x0);
    else
      piece += circ_antideriv(x1, R) - circ_antideriv(x0, R);
    area += piece;
  }
  return area;
}

}  // namespace detail

inline double circle_rect_area(double cx, double cy, double R, double x0, double x1, double y0,
                               double y1) {
  if (R <= 0.0) return 0.0;
  return detail::circle_strip_area(x0 - cx, x1 - cx, y0 - cy, y1 - cy, R);
}

enum class GridKind { Disk, HalfDisk, Annulus, Cylinder, Strip };

inline const char* kind_name(GridKind k) {
  switch (k) {
    case GridKind::Disk: return "disk";
    case GridKind::HalfDisk: return "halfdisk";
    case GridKind::Annulus: return "annulus";
    case GridKind::Cylinder: return "cylinder";
    case GridKind::Strip: return "strip";
  }
  return "?";
}

// A sampled planar domain. Axis 0 is x (Disk, HalfDisk), r (Annulus) or t
// (Cylinder, Strip); axis 1 is y, phi or theta. Node index = i0*n1 + i1.
//
// Coordinate conventions:
//   Disk(R)       x in [-R,R], y in [-R,R]; Cartesian nodes on the bounding
//                 square, quadrature restricted to the disk by exact cell
//                 coverage areas.
//   HalfDisk(R)   x in [-R,R], y in [0,R]; quadrature restricted to the
//                 closed upper half disk. Row i1 = 0 is the real segment.
//   Annulus(a,b)  r in [a,b], phi in [0,2pi] (both endpoints present,
//                 non-periodic); planar metric, cell weight r dr dphi.
//   Cylinder(a,b) t in [a,b], theta in [0,2pi) periodic (no seam node).
//   Strip(a,b)    t in [a,b], theta in [0,1] non-periodic.
class Grid {
 public:
  static Grid disk(double radius, int n0, int n1) {
    require(radius > 0, "disk radius must be positive");
    return Grid(GridKind::Disk, radius, 0.0, n0, n1, -radius, radius, -radius, radius, false);
  }
  static Grid half_disk(double radius, int n0, int n1) {
    require(radius > 0, "half-disk radius must be positive");
    return Grid(GridKind::HalfDisk, radius, 0.0, n0, n1, -radius, radius, 0.0, radius, false);
  }
  static Grid annulus(double inner, double outer, int n0, int n1) {
    require(inner > 0 && inner < outer, "annulus requires 0 < inner < outer");
    return Grid(GridKind::Annulus, inner, outer, n0, n1, inner, outer, 0.0, 2 * pi, false);
  }
  static Grid cylinder(double a, double b, int n0, int n1) {
    require(a < b, "cylinder requires a < b");
    return Grid(GridKind::Cylinder, a, b, n0, n1, a, b, 0.0, 2 * pi, true);
  }
  static Grid strip(double a, double b, int n0, int n1) {
    require(a < b, "strip requires a < b");
    return Grid(GridKind::Strip, a, b, n0, n1, a, b, 0.0, 1.0, false);
  }

  GridKind kind() const { return kind_; }
  double param0() const { return p0_; }
  double param1() const { return p1_; }
  int n0() const { return n0_; }
  int n1() const { return n1_; }
  int node_count() const { return n0_ * n1_; }
  bool periodic1() const { return periodic1_; }
  double h0() const { return h0_; }
  double h1() const { return h1_; }

  double coord0(int i0) const { return lo0_ + h0_ * i0; }
  // for the periodic axis the last node is lo1 + h1*(n1-1) < hi1
  double coord1(int i1) const { return lo1_ + h1_ * i1; }

  int index(int i0, int i1) const { return i0 * n1_ + i1; }

  // planar position of a node (polar kinds are mapped to the plane)
  std::array<double, 2> position(int i0, int i1) const {
    double c0 = coord0(i0), c1 = coord1(i1);
    if (kind_ == GridKind::Annulus) return {c0 * std::cos(c1), c0 * std::sin(c1)};
    return {c0, c1};
  }

  int cells0() const { return n0_ - 1; }
  int cells1() const { return periodic1_ ? n1_ : n1_ - 1; }

  // the four node indices at the corners of cell (c0,c1)
  std::array<int, 4> cell_corners(int c0, int c1) const {
    int c1n = periodic1_ ? (c1 + 1) % n1_ : c1 + 1;
    return {index(c0, c1), index(c0, c1n), index(c0 + 1, c1), index(c0 + 1, c1n)};
  }

  std::array<double, 2> cell_center(int c0, int c1) const {
    return {lo0_ + h0_ * (c0 + 0.5), lo1_ + h1_ * (c1 + 0.5)};
  }

  // planar center of a cell
  std::array<double, 2> cell_center_xy(int c0, int c1) const {
    auto cc = cell_center(c0, c1);
    if (kind_ == GridKind::Annulus) return {cc[0] * std::cos(cc[1]), cc[0] * std::sin(cc[1])};
    return cc;
  }

  // Quadrature weight of a cell: cell measure restricted to the domain.
  // Disk/HalfDisk use the exact circle-rectangle overlap; Annulus carries the
  // polar metric factor r at the cell midline; Cylinder/Strip are flat.
  double cell_weight(int c0, int c1) const {
    double base = h0_ * h1_;
    switch (kind_) {
      case GridKind::Disk: {
        double x0 = coord0(c0), y0 = coord1(c1);
        return circle_rect_area(0, 0, p0_, x0, x0 + h0_, y0, y0 + h1_);
      }
      case GridKind::HalfDisk: {
        double x0 = coord0(c0), y0 = coord1(c1);
        return circle_rect_area(0, 0, p0_, x0, x0 + h0_, y0, y0 + h1_);
      }
      case GridKind::Annulus: {
        double rc = coord0(c0) + 0.5 * h0_;
        return base * rc;
      }
      default: return base;
    }
  }

  bool same_layout(const Grid& o) const {
    return kind_ == o.kind_ && p0_ == o.p0_ && p1_ == o.p1_ && n0_ == o.n0_ && n1_ == o.n1_;
  }

 private:
  Grid(GridKind k, double p0, double p1, int n0, int n1, double lo0, double hi0, double lo1,
       double hi1, bool periodic1)
      : kind_(k), p0_(p0), p1_(p1), n0_(n0), n1_(n1), lo0_(lo0), lo1_(lo1), periodic1_(periodic1) {
    require(n0 >= 3 && n1 >= 3, "grid resolution must be >= 3 per axis");
    h0_ = (hi0 - lo0) / (n0_ - 1);
    h1_ = periodic1_ ? (hi1 - lo1) / n1_ : (hi1 - lo1) / (n1_ - 1);
    require(h0_ > 0 && h1_ > 0, "grid spacing must be positive");
  }

  GridKind kind_;
  double p0_, p1_;
  int n0_, n1_;
  double lo0_, lo1_;
  double h0_, h1_;
  bool periodic1_;
};

// A sub-rectangle of grid index space, optionally cut by a planar disk.
// Quadrature over a Region sums the cells whose index lies in the rectangle;
// the optional disk further scales each cell by its overlap fraction.
// Adjacent regions sharing a node boundary partition the cells exactly.
// On a periodic axis the upper bound n1 stands for the seam node, so the
// wrap-around cell row is included.
class Region {
 public:
  static Region all(const Grid& g) {
    return Region(0, g.n0() - 1, 0, g.periodic1() ? g.n1() : g.n1() - 1);
  }

  static Region rect(const Grid& g, int i0_lo, int i0_hi, int i1_lo, int i1_hi) {
    int max1 = g.periodic1() ? g.n1() : g.n1() - 1;
    require(0 <= i0_lo && i0_lo < i0_hi && i0_hi <= g.n0() - 1, "region axis-0 bounds invalid");
    require(0 <= i1_lo && i1_lo < i1_hi && i1_hi <= max1, "region axis-1 bounds invalid");
    return Region(i0_lo, i0_hi, i1_lo, i1_hi);
  }

  // nodes with coord0 in [a,b] (b inclusive), full axis 1
  static Region span0(const Grid& g, double a, double b) {
    require(a < b, "span requires a < b");
    int lo = (int)std::ceil((a - g.coord0(0)) / g.h0() - 1e-9);
    int hi = (int)std::floor((b - g.coord0(0)) / g.h0() + 1e-9);
    lo = std::max(lo, 0);
    hi = std::min(hi, g.n0() - 1);
    require(lo < hi, "span contains no cells");
    return Region(lo, hi, 0, g.periodic1() ? g.n1() : g.n1() - 1);
  }

  // planar disk mask (Disk/HalfDisk grids); the index rectangle tightens to
  // the circle's bounding box
  static Region disk(const Grid& g, double cx, double cy, double radius) {
    require(radius > 0, "region radius must be positive");
    require(g.kind() == GridKind::Disk || g.kind() == GridKind::HalfDisk,
            "disk regions require a Cartesian grid kind");
    int i0_lo = std::clamp((int)std::floor((cx - radius - g.coord0(0)) / g.h0()), 0, g.n0() - 2);
    int i0_hi = std::clamp((int)std::ceil((cx + radius - g.coord0(0)) / g.h0()), i0_lo + 1,
                           g.n0() - 1);
    int i1_lo = std::clamp((int)std::floor((cy - radius - g.coord1(0)) / g.h1()), 0, g.n1() - 2);
    int i1_hi = std::clamp((int)std::ceil((cy + radius - g.coord1(0)) / g.h1()), i1_lo + 1,
                           g.n1() - 1);
    Region r(i0_lo, i0_hi, i1_lo, i1_hi);
    r.circle_ = std::array<double, 3>{cx, cy, radius};
    return r;
  }

  int i0_lo() const { return i0_lo_; }
  int i0_hi() const { return i0_hi_; }
  int i1_lo() const { return i1_lo_; }
  int i1_hi() const { return i1_hi_; }
  const std::optional<std::array<double, 3>>& circle() const { return circle_; }

  Region intersect(const Region& o) const {
    Region r(std::max(i0_lo_, o.i0_lo_), std::min(i0_hi_, o.i0_hi_), std::max(i1_lo_, o.i1_lo_),
             std::min(i1_hi_, o.i1_hi_));
    require(r.i0_lo_ < r.i0_hi_ && r.i1_lo_ < r.i1_hi_, "region intersection is empty");
    r.circle_ = circle_ ? circle_ : o.circle_;
    return r;
  }

  // fraction of cell (c0,c1) covered by the optional disk mask
  double mask_fraction(const Grid& g, int c0, int c1) const {
    if (!circle_) return 1.0;
    double x0 = g.coord0(c0), y0 = g.coord1(c1);
    double cell = g.h0() * g.h1();
    double a = circle_rect_area((*circle_)[0], (*circle_)[1], (*circle_)[2], x0, x0 + g.h0(), y0,
                                y0 + g.h1());
    return a / cell;
  }

  bool contains_cell(int c0, int c1) const {
    return c0 >= i0_lo_ && c0 < i0_hi_ && c1 >= i1_lo_ && c1 < i1_hi_;
  }

 private:
  Region(int a, int b, int c, int d) : i0_lo_(a), i0_hi_(b), i1_lo_(c), i1_hi_(d) {}
  int i0_lo_, i0_hi_, i1_lo_, i1_hi_;
  std::optional<std::array<double, 3>> circle_;
};

}  // namespace phk
