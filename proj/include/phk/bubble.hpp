#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "phk/calculus.hpp"
#include "phk/common.hpp"
#include "phk/grid.hpp"
#include "phk/sample.hpp"

namespace phk {

// Ordered list of samples on a common grid (the sequence u_n), with optional
// per-member structure fields.
class SequenceFamily {
 public:
  explicit SequenceFamily(std::vector<MapSample> members,
                          std::vector<StructureField> structures = {})
      : members_(std::move(members)), structures_(std::move(structures)) {
    require(!members_.empty(), "family must be nonempty");
    for (const MapSample& m : members_) {
      require(m.grid().same_layout(members_.front().grid()), "family members share one grid");
      require(m.target_dim() == members_.front().target_dim(), "family dimension mismatch");
    }
    if (!structures_.empty())
      require(structures_.size() == members_.size(), "one structure per member when provided");
  }

  int size() const { return (int)members_.size(); }
  const MapSample& member(int i) const { return members_[i]; }
  const Grid& grid() const { return members_.front().grid(); }

 private:
  std::vector<MapSample> members_;
  std::vector<StructureField> structures_;
};

// Reusable disk-energy evaluation: the gradient density is computed once and
// integrated against any disk window with exact circle-cell overlap weights.
class DiskEnergyProbe {
 public:
  explicit DiskEnergyProbe(const MapSample& u)
      : grid_(u.grid()), density_(detail::gradient_density(u)) {
    require(grid_.kind() == GridKind::Disk || grid_.kind() == GridKind::HalfDisk,
            "disk probes need a Cartesian grid kind");
  }

  const Grid& grid() const { return grid_; }

  double disk_energy(double cx, double cy, double r) const {
    const Grid& g = grid_;
    int c0_lo = std::max(0, (int)std::floor((cx - r - g.coord0(0)) / g.h0()) - 1);
    int c0_hi = std::min(g.cells0() - 1, (int)std::ceil((cx + r - g.coord0(0)) / g.h0()));
    int c1_lo = std::max(0, (int)std::floor((cy - r - g.coord1(0)) / g.h1()) - 1);
    int c1_hi = std::min(g.cells1() - 1, (int)std::ceil((cy + r - g.coord1(0)) / g.h1()));
    std::vector<double> acc;
    acc.reserve((c0_hi - c0_lo + 1) * (c1_hi - c1_lo + 1));
    for (int c0 = c0_lo; c0 <= c0_hi; ++c0)
      for (int c1 = c1_lo; c1 <= c1_hi; ++c1) {
        double x0 = g.coord0(c0), y0 = g.coord1(c1);
        double cover = circle_rect_area(cx, cy, r, x0, x0 + g.h0(), y0, y0 + g.h1());
        if (cover <= 0) continue;
        double domain = g.cell_weight(c0, c1) / (g.h0() * g.h1());
        auto corners = g.cell_corners(c0, c1);
        double m = 0.25 * (density_[corners[0]] + density_[corners[1]] + density_[corners[2]] +
                           density_[corners[3]]);
        acc.push_back(cover * domain * m);
      }
    return pairwise_sum(acc);
  }

  // largest single-cell contribution inside the window: the grid quantum of
  // a disk-energy measurement
  double cell_quantum(double cx, double cy, double r) const {
    const Grid& g = grid_;
    int c0_lo = std::max(0, (int)std::floor((cx - r - g.coord0(0)) / g.h0()) - 1);
    int c0_hi = std::min(g.cells0() - 1, (int)std::ceil((cx + r - g.coord0(0)) / g.h0()));
    int c1_lo = std::max(0, (int)std::floor((cy - r - g.coord1(0)) / g.h1()) - 1);
    int c1_hi = std::min(g.cells1() - 1, (int)std::ceil((cy + r - g.coord1(0)) / g.h1()));
    double worst = 0;
    for (int c0 = c0_lo; c0 <= c0_hi; ++c0)
      for (int c1 = c1_lo; c1 <= c1_hi; ++c1) {
        auto corners = g.cell_corners(c0, c1);
        double m = 0.25 * (density_[corners[0]] + density_[corners[1]] + density_[corners[2]] +
                           density_[corners[3]]);
        worst = std::max(worst, g.cell_weight(c0, c1) * m);
      }
    return worst;
  }

 private:
  Grid grid_;
  std::vector<double> density_;
};

struct CoverDisk {
  double cx, cy, radius;
};

// Hexagonal-lattice disk cover with disk diameters below a; every domain
// node is covered by at least one and at most three disks, verified
// exhaustively at construction.
class CoverSpec {
 public:
  CoverSpec(const Grid& grid, std::vector<CoverDisk> disks) : disks_(std::move(disks)) {
    int worst = 0;
    for (int i0 = 0; i0 < grid.n0(); ++i0)
      for (int i1 = 0; i1 < grid.n1(); ++i1) {
        auto p = grid.position(i0, i1);
        if (grid.kind() == GridKind::Disk &&
            p[0] * p[0] + p[1] * p[1] > grid.param0() * grid.param0())
          continue;
        int mult = 0;
        for (const CoverDisk& d : disks_) {
          double dx = p[0] - d.cx, dy = p[1] - d.cy;
          if (dx * dx + dy * dy <= d.radius * d.radius) ++mult;
        }
        require(mult >= 1, "cover misses a domain node");
        require(mult <= 3, "cover multiplicity exceeds 3");
        worst = std::max(worst, mult);
      }
    max_multiplicity_ = worst;
  }

  const std::vector<CoverDisk>& disks() const { return disks_; }
  int max_multiplicity() const { return max_multiplicity_; }

 private:
  std::vector<CoverDisk> disks_;
  int max_multiplicity_ = 0;
};

inline CoverSpec patch_cover(const Grid& grid, double a) {
  require(grid.kind() == GridKind::Disk, "patch covers are built over disk grids");
  double diam = 2 * grid.param0();
  // scales somewhat above the diameter are legitimate: the whole domain then
  // fits in one patch
  require(a <= 4 * diam, "patch scale far exceeds the domain diameter");
  require(a >= 3 * std::max(grid.h0(), grid.h1()), "patch scale too small for the grid spacing");

  double rho = 0.499 * a;  // diameter strictly below a
  // a single patch suffices for small domains
  bool single = true;
  for (int i0 = 0; i0 < grid.n0() && single; ++i0)
    for (int i1 = 0; i1 < grid.n1(); ++i1) {
      auto p = grid.position(i0, i1);
      if (grid.kind() == GridKind::Disk &&
          p[0] * p[0] + p[1] * p[1] > grid.param0() * grid.param0())
        continue;
      if (p[0] * p[0] + p[1] * p[1] > rho * rho) {
        single = false;
        break;
      }
    }
  if (single) return CoverSpec(grid, {{0.0, 0.0, rho}});

  // hexagonal covering lattice: pitch 0.95 sqrt(3) rho keeps the Voronoi
  // circumradius strictly inside rho
  double pitch = 0.95 * std::sqrt(3.0) * rho;
  double row = pitch * std::sqrt(3.0) / 2.0;
  double R = grid.param0();
  std::vector<CoverDisk> disks;
  int jmax = (int)std::ceil((R + rho) / row) + 1;
  for (int j = -jmax; j <= jmax; ++j) {
    double y = j * row;
    double offset = (j % 2 == 0) ? 0.0 : pitch / 2.0;
    int imax = (int)std::ceil((R + rho) / pitch) + 1;
    for (int i = -imax; i <= imax; ++i) {
      double x = offset + i * pitch;
      if (x * x + y * y > (R + rho) * (R + rho)) continue;
      disks.push_back({x, y, rho});
    }
  }
  // keep only patches that contain at least one domain node
  std::vector<CoverDisk> used;
  for (const CoverDisk& d : disks) {
    bool hit = false;
    for (int i0 = 0; i0 < grid.n0() && !hit; ++i0)
      for (int i1 = 0; i1 < grid.n1(); ++i1) {
        auto p = grid.position(i0, i1);
        if (p[0] * p[0] + p[1] * p[1] > R * R) continue;
        double dx = p[0] - d.cx, dy = p[1] - d.cy;
        if (dx * dx + dy * dy <= d.radius * d.radius) {
          hit = true;
          break;
        }
      }
    if (hit) used.push_back(d);
  }
  return CoverSpec(grid, std::move(used));
}

// Dyadic patching refinement: a patch is persistently bad when its energy
// exceeds eps for all sufficiently late members (a trailing run of at least
// two); bad patches are refined at halved scales and the limit points of the
// nested chains are the bubble points, localized to the node maximizing the
// local concentration. The trailing-run reading matches concentration at
// scale-dependent onset: finer patches turn bad later in the sequence.
inline std::vector<std::array<double, 2>> find_bubble_points(const SequenceFamily& fam,
                                                             double eps) {
  require(eps > 0, "eps must be positive");
  require(fam.size() >= 3, "family needs at least three members");
  const Grid& g = fam.grid();
  require(g.kind() == GridKind::Disk, "bubble detection runs on disk grids");

  std::vector<DiskEnergyProbe> probes;
  for (int i = 0; i < fam.size(); ++i) probes.emplace_back(fam.member(i));

  auto persistent_bad = [&](double cx, double cy, double r) {
    int run = 0;
    for (int i = (int)probes.size() - 1; i >= 0 && run < 2; --i) {
      if (probes[i].disk_energy(cx, cy, r) > eps)
        ++run;
      else
        break;
    }
    return run >= 2;
  };

  // refine dyadically while some patch stays persistently bad; when a level
  // dies out, keep the survivors of the last bad level (the patch scale has
  // dropped below the tail's concentration scale, not the concentration)
  double R = g.param0();
  double h = std::max(g.h0(), g.h1());
  double a = R;
  std::vector<std::array<double, 2>> active;
  double active_a = R;
  std::vector<std::array<double, 2>> prev{{0.0, 0.0}};
  double prev_a = 2 * R;  // first level considers every patch
  while (a >= std::max(4 * h, R / 64.0)) {
    CoverSpec cover = patch_cover(g, a);
    std::vector<std::array<double, 2>> next;
    for (const CoverDisk& d : cover.disks()) {
      bool near_active = false;
      for (const auto& pt : prev) {
        double dx = d.cx - pt[0], dy = d.cy - pt[1];
        if (dx * dx + dy * dy <= prev_a * prev_a) {
          near_active = true;
          break;
        }
      }
      if (!near_active) continue;
      if (persistent_bad(d.cx, d.cy, d.radius)) next.push_back({d.cx, d.cy});
    }
    if (next.empty()) break;
    active = next;
    active_a = a;
    prev = std::move(next);
    prev_a = a;
    a /= 2;
  }
  if (active.empty()) return {};
  double parent_a = active_a;

  // cluster surviving centers, pick the strongest window and refine it to
  // the energy centroid (exact for symmetric concentrations)
  double merge = 2 * parent_a;
  std::vector<std::array<double, 2>> points;
  std::vector<bool> taken(active.size(), false);
  const DiskEnergyProbe& last = probes.back();
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (taken[i]) continue;
    double cx = 0, cy = 0;
    int cnt = 0;
    for (std::size_t j = i; j < active.size(); ++j) {
      double dx = active[j][0] - active[i][0], dy = active[j][1] - active[i][1];
      if (!taken[j] && dx * dx + dy * dy <= merge * merge) {
        taken[j] = true;
        cx += active[j][0];
        cy += active[j][1];
        ++cnt;
      }
    }
    cx /= cnt;
    cy /= cnt;
    double window = parent_a;
    double best = -1, bx = cx, by = cy;
    for (int i0 = 0; i0 < g.n0(); ++i0)
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        double x = g.coord0(i0), y = g.coord1(i1);
        double dx = x - cx, dy = y - cy;
        if (dx * dx + dy * dy > parent_a * parent_a) continue;
        double e = last.disk_energy(x, y, window / 2);
        if (e > best) {
          best = e;
          bx = x;
          by = y;
        }
      }
    // density centroid over the winning window (exact for symmetric bumps)
    double wsum = 0, sx = 0, sy = 0;
    for (int i0 = 0; i0 < g.n0(); ++i0)
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        double x = g.coord0(i0), y = g.coord1(i1);
        double dx = x - bx, dy = y - by;
        if (dx * dx + dy * dy > window * window) continue;
        double w = last.disk_energy(x, y, 1.5 * h);
        wsum += w;
        sx += w * x;
        sy += w * y;
      }
    if (wsum > 0) points.push_back({sx / wsum, sy / wsum});
    else points.push_back({bx, by});
  }
  return points;
}

// Largest radius r <= cap/2 with sup over sampled centers of the disk energy
// below eps, located by bisection; the cap is attained for diffuse maps and
// saturation at the smallest resolvable radius is an error.
inline double maximal_radius(const DiskEnergyProbe& probe, double eps, double cap,
                             const Region& center_region) {
  require(eps > 0, "eps must be positive");
  const Grid& g = probe.grid();
  require(cap > 0 && cap <= 2 * g.param0(), "cap must lie within the domain scale");

  // sampled centers: stride the region so the scan stays desk-scale, with
  // the lattice anchored at the node nearest the region center
  std::vector<std::array<double, 2>> centers;
  int span0 = center_region.i0_hi() - center_region.i0_lo() + 1;
  int span1 = center_region.i1_hi() - center_region.i1_lo() + 1;
  int stride = std::max(1, (int)std::floor(std::sqrt((double)span0 * span1 / 1200.0)));
  int a0 = center_region.i0_lo(), a1 = center_region.i1_lo();
  if (center_region.circle()) {
    const auto& c = *center_region.circle();
    int c0 = std::clamp((int)std::lround((c[0] - g.coord0(0)) / g.h0()), center_region.i0_lo(),
                        center_region.i0_hi());
    int c1 = std::clamp((int)std::lround((c[1] - g.coord1(0)) / g.h1()), center_region.i1_lo(),
                        center_region.i1_hi());
    a0 = center_region.i0_lo() + (c0 - center_region.i0_lo()) % stride;
    a1 = center_region.i1_lo() + (c1 - center_region.i1_lo()) % stride;
  }
  for (int i0 = a0; i0 <= center_region.i0_hi(); i0 += stride)
    for (int i1 = a1; i1 <= center_region.i1_hi(); i1 += stride) {
      double x = g.coord0(i0), y = g.coord1(i1);
      if (center_region.circle()) {
        const auto& c = *center_region.circle();
        double dx = x - c[0], dy = y - c[1];
        if (dx * dx + dy * dy > c[2] * c[2]) continue;
      }
      centers.push_back({x, y});
    }
  require(!centers.empty(), "center region holds no nodes");

  // the bisection only needs the predicate "sup <= eps": stop at the first
  // violating center
  auto sup_below = [&](double r) {
    for (const auto& c : centers)
      if (probe.disk_energy(c[0], c[1], r) > eps) return false;
    return true;
  };

  double r_min = std::max(g.h0(), g.h1());
  if (!sup_below(r_min))
    throw numerical_error("concentration saturates the smallest resolvable radius");
  double r_cap = cap / 2;
  if (sup_below(r_cap)) return r_cap;
  double lo = r_min, hi = r_cap;
  for (int it = 0; it < 60 && (hi - lo) > 1e-9 * r_cap; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sup_below(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

inline double maximal_radius(const MapSample& u, double eps, double cap,
                             const Region& center_region) {
  return maximal_radius(DiskEnergyProbe(u), eps, cap, center_region);
}

// Node maximizing the disk energy at radius r; ties resolve to the lowest
// row-major index. The achieved energy must reach eps up to one cell's
// quadrature quantum.
inline std::array<double, 2> concentration_center(const DiskEnergyProbe& probe, double r,
                                                  double eps, const Region& center_region) {
  const Grid& g = probe.grid();
  double best = -1;
  std::array<double, 2> at{0, 0};
  for (int i0 = center_region.i0_lo(); i0 <= center_region.i0_hi(); ++i0)
    for (int i1 = center_region.i1_lo(); i1 <= center_region.i1_hi(); ++i1) {
      double x = g.coord0(i0), y = g.coord1(i1);
      if (center_region.circle()) {
        const auto& c = *center_region.circle();
        double dx = x - c[0], dy = y - c[1];
        if (dx * dx + dy * dy > c[2] * c[2]) continue;
      }
      double e = probe.disk_energy(x, y, r);
      if (e > best * (1 + 1e-9)) {  // strict improvement keeps row-major ties
        best = e;
        at = {x, y};
      }
    }
  require(best >= 0, "center region holds no nodes");
  double quantum = probe.cell_quantum(at[0], at[1], r);
  if (best < eps - quantum)
    throw invalid_input("no center achieves the concentration level eps");
  return at;
}

inline std::array<double, 2> concentration_center(const MapSample& u, double r, double eps,
                                                  const Region& center_region) {
  return concentration_center(DiskEnergyProbe(u), r, eps, center_region);
}

// v(z) = u(x + r z) by bilinear resampling onto a disk grid of radius
// out_radius with the source resolution.
inline MapSample rescale(const MapSample& u, complexd x, double r, double out_radius) {
  const Grid& g = u.grid();
  require(g.kind() == GridKind::Disk, "rescale expects a disk sample");
  require(r > 0 && out_radius > 0, "radii must be positive");
  double reach = r * out_radius;
  require(std::abs(x.real()) + reach <= g.param0() + 1e-12 &&
              std::abs(x.imag()) + reach <= g.param0() + 1e-12,
          "rescaling window exits the domain");

  Grid out = Grid::disk(out_radius, g.n0(), g.n1());
  const int n = u.target_dim();
  std::vector<complexd> vals((std::size_t)out.node_count() * n);
  for (int i0 = 0; i0 < out.n0(); ++i0)
    for (int i1 = 0; i1 < out.n1(); ++i1) {
      double px = x.real() + r * out.coord0(i0);
      double py = x.imag() + r * out.coord1(i1);
      double fx = (px - g.coord0(0)) / g.h0();
      double fy = (py - g.coord1(0)) / g.h1();
      int cx = std::clamp((int)std::floor(fx), 0, g.n0() - 2);
      int cy = std::clamp((int)std::floor(fy), 0, g.n1() - 2);
      double ax = std::clamp(fx - cx, 0.0, 1.0), ay = std::clamp(fy - cy, 0.0, 1.0);
      for (int c = 0; c < n; ++c) {
        complexd v00 = u.value(g.index(cx, cy), c), v01 = u.value(g.index(cx, cy + 1), c);
        complexd v10 = u.value(g.index(cx + 1, cy), c), v11 = u.value(g.index(cx + 1, cy + 1), c);
        vals[(std::size_t)out.index(i0, i1) * n + c] =
            (1 - ax) * ((1 - ay) * v00 + ay * v01) + ax * ((1 - ay) * v10 + ay * v11);
      }
    }
  return MapSample(out, n, std::move(vals));
}

struct SubcaseResult {
  std::string label;  // one of 3', 3'', 3'_b, 3''_b, 3'''_b, 3''''_b, none
  bool rho_over_r_bounded = false;
  bool R_over_r_bounded = false;
  bool R_over_rho_bounded = false;
};

// "Bounded vs unbounded" for a finite prefix is undecidable; the windowed
// heuristic compares the last-third maximum against bound_factor times the
// first-third maximum. The default 2.5 separates saturating ratios from
// linear or geometric growth.
inline bool sequence_bounded(const std::vector<double>& seq, double bound_factor) {
  int m = (int)seq.size();
  int third = (m + 2) / 3;
  double first = 0, last = 0;
  for (int i = 0; i < third; ++i) first = std::max(first, seq[i]);
  for (int i = m - third; i < m; ++i) last = std::max(last, seq[i]);
  if (first == 0) return last == 0;
  return last <= bound_factor * first;
}

// Interior degenerations classify on R_n/r_n; boundary degenerations on
// rho_n/r_n first and then R_n/r_n (bounded branch) or R_n/rho_n.
inline SubcaseResult classify_subcase(const std::vector<double>& Rn, const std::vector<double>& rn,
                                      const std::optional<std::vector<double>>& rhon = {},
                                      double bound_factor = 2.5) {
  require(Rn.size() == rn.size() && Rn.size() >= 5, "series must share a length >= 5");
  if (rhon) require(rhon->size() == Rn.size(), "series must share a length >= 5");
  for (double v : rn) require(v > 0, "radii must be positive");

  std::vector<double> R_over_r(Rn.size());
  for (std::size_t i = 0; i < Rn.size(); ++i) R_over_r[i] = Rn[i] / rn[i];
  SubcaseResult res;
  res.R_over_r_bounded = sequence_bounded(R_over_r, bound_factor);
  if (!rhon) {
    res.label = res.R_over_r_bounded ? "3'" : "3''";
    return res;
  }
  std::vector<double> rho_over_r(Rn.size()), R_over_rho(Rn.size());
  for (std::size_t i = 0; i < Rn.size(); ++i) {
    require((*rhon)[i] > 0, "rho series must be positive");
    rho_over_r[i] = (*rhon)[i] / rn[i];
    R_over_rho[i] = Rn[i] / (*rhon)[i];
  }
  res.rho_over_r_bounded = sequence_bounded(rho_over_r, bound_factor);
  res.R_over_rho_bounded = sequence_bounded(R_over_rho, bound_factor);
  if (res.rho_over_r_bounded)
    res.label = res.R_over_r_bounded ? "3'_b" : "3''_b";
  else
    res.label = res.R_over_rho_bounded ? "3'''_b" : "3''''_b";
  return res;
}

struct QuantizationReport {
  double energy = 0.0;
  double oscillation = 0.0;  // bounding-box diameter of the values
  bool candidate = false;    // energy >= eps3
};

// Energy-quantization gate: detected profiles must carry at least the
// threshold energy of a nonconstant sphere.
inline QuantizationReport quantization_gate(const MapSample& v, double eps3) {
  require(eps3 > 0, "eps3 must be positive");
  QuantizationReport rep;
  rep.energy = energy(v);
  const int n = v.target_dim();
  std::vector<double> lo(2 * n, 1e300), hi(2 * n, -1e300);
  for (int node = 0; node < v.grid().node_count(); ++node)
    for (int c = 0; c < n; ++c) {
      complexd z = v.value(node, c);
      lo[2 * c] = std::min(lo[2 * c], z.real());
      hi[2 * c] = std::max(hi[2 * c], z.real());
      lo[2 * c + 1] = std::min(lo[2 * c + 1], z.imag());
      hi[2 * c + 1] = std::max(hi[2 * c + 1], z.imag());
    }
  double d = 0;
  for (int i = 0; i < 2 * n; ++i) d += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  rep.oscillation = std::sqrt(d);
  rep.candidate = rep.energy >= eps3;
  return rep;
}

struct BubbleReport {
  std::vector<std::array<double, 2>> points;
  std::vector<double> radii;                     // r_n per member
  std::vector<std::array<double, 2>> centers;    // x_n per member
  std::string subcase = "none";
  double profile_energy = 0.0;
  double eps = 0.0;
};

// Full detection pipeline around the first bubble point: per-member maximal
// radii and concentration centers, interior subcase classification on
// R_n = |x_n - y*|, and the rescaled profile's energy.
inline BubbleReport analyze_family(const SequenceFamily& fam, double eps, double cap) {
  BubbleReport rep;
  rep.eps = eps;
  rep.points = find_bubble_points(fam, eps);
  if (rep.points.empty()) return rep;
  const auto& y = rep.points.front();
  const Grid& g = fam.grid();
  Region centers = Region::disk(g, y[0], y[1], cap / 2);
  for (int i = 0; i < fam.size(); ++i) {
    DiskEnergyProbe probe(fam.member(i));
    double r = maximal_radius(probe, eps, cap, centers);
    rep.radii.push_back(r);
    if (r < cap / 2 - 1e-12) {
      rep.centers.push_back(concentration_center(probe, r, eps, centers));
    } else {
      rep.centers.push_back({y[0], y[1]});  // diffuse member: cap attained
    }
  }
  if (fam.size() >= 5) {
    std::vector<double> Rn;
    for (int i = 0; i < fam.size(); ++i) {
      double dx = rep.centers[i][0] - y[0], dy = rep.centers[i][1] - y[1];
      Rn.push_back(std::sqrt(dx * dx + dy * dy) + 1e-300);
    }
    rep.subcase = classify_subcase(Rn, rep.radii).label;
  }
  // rescaled profile of the last member around its concentration disk
  const auto& xl = rep.centers.back();
  double rl = rep.radii.back();
  double out_r = 2.0;
  double reach = std::min({g.param0() - std::abs(xl[0]), g.param0() - std::abs(xl[1])});
  out_r = std::min(out_r, 0.95 * reach / rl);
  if (out_r > 0.1) {
    MapSample prof = rescale(fam.member(fam.size() - 1), complexd(xl[0], xl[1]), rl, out_r);
    rep.profile_energy = quantization_gate(prof, eps).energy;
  }
  return rep;
}

}  // namespace phk
