#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "phk/common.hpp"
#include "phk/grid.hpp"
#include "phk/sample.hpp"

namespace phk {

// Per-node partial derivatives of a sampled map, in planar coordinates:
// (d/dx, d/dy) for Cartesian and polar kinds, (d/dt, d/dtheta) for cylinders
// and strips.
struct Gradient {
  MapSample dx;
  MapSample dy;
};

namespace detail {

// second-order stencils along one axis; values strided in memory
inline complexd diff_interior(const complexd* lo, const complexd* hi, double h) {
  return (*hi - *lo) / (2.0 * h);
}

template <typename Fetch>
inline void axis_derivative(int count, double h, bool periodic, Fetch fetch, complexd* out) {
  if (periodic) {
    for (int i = 0; i < count; ++i) {
      const complexd a = fetch((i + count - 1) % count);
      const complexd b = fetch((i + 1) % count);
      out[i] = (b - a) / (2.0 * h);
    }
    return;
  }
  out[0] = (-3.0 * fetch(0) + 4.0 * fetch(1) - fetch(2)) / (2.0 * h);
  for (int i = 1; i + 1 < count; ++i) out[i] = (fetch(i + 1) - fetch(i - 1)) / (2.0 * h);
  out[count - 1] = (3.0 * fetch(count - 1) - 4.0 * fetch(count - 2) + fetch(count - 3)) / (2.0 * h);
}

}  // namespace detail

// Centered second-order differences at interior nodes, one-sided second-order
// at non-periodic boundaries, periodic wrap on the cylinder theta axis.
// Exact for affine data.
inline Gradient gradient(const MapSample& u) {
  const Grid& g = u.grid();
  const int n = u.target_dim();
  require(g.n0() >= 3 && g.n1() >= 3, "gradient requires resolution >= 3 per axis");

  std::vector<complexd> d0((std::size_t)g.node_count() * n);
  std::vector<complexd> d1((std::size_t)g.node_count() * n);

  std::vector<complexd> line(std::max(g.n0(), g.n1()));
  // axis 0
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int c = 0; c < n; ++c) {
      detail::axis_derivative(
          g.n0(), g.h0(), false, [&](int i0) { return u.value(g.index(i0, i1), c); }, line.data());
      for (int i0 = 0; i0 < g.n0(); ++i0) d0[(std::size_t)g.index(i0, i1) * n + c] = line[i0];
    }
  // axis 1
  for (int i0 = 0; i0 < g.n0(); ++i0)
    for (int c = 0; c < n; ++c) {
      detail::axis_derivative(
          g.n1(), g.h1(), g.periodic1(), [&](int i1) { return u.value(g.index(i0, i1), c); },
          line.data());
      for (int i1 = 0; i1 < g.n1(); ++i1) d1[(std::size_t)g.index(i0, i1) * n + c] = line[i1];
    }

  if (g.kind() == GridKind::Annulus) {
    // (d/dr, d/dphi) -> (d/dx, d/dy)
    for (int i0 = 0; i0 < g.n0(); ++i0) {
      double r = g.coord0(i0);
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        double phi = g.coord1(i1);
        double c = std::cos(phi), s = std::sin(phi);
        for (int k = 0; k < n; ++k) {
          std::size_t idx = (std::size_t)g.index(i0, i1) * n + k;
          complexd ur = d0[idx], uphi = d1[idx];
          d0[idx] = c * ur - s / r * uphi;
          d1[idx] = s * ur + c / r * uphi;
        }
      }
    }
  }

  return Gradient{MapSample(g, n, std::move(d0)), MapSample(g, n, std::move(d1))};
}

namespace detail {

// |du|^2 at every node
inline std::vector<double> gradient_density(const MapSample& u) {
  Gradient gr = gradient(u);
  const int n = u.target_dim();
  std::vector<double> dens(u.grid().node_count(), 0.0);
  for (int node = 0; node < u.grid().node_count(); ++node) {
    double s = 0;
    for (int c = 0; c < n; ++c) s += std::norm(gr.dx.value(node, c)) + std::norm(gr.dy.value(node, c));
    dens[node] = s;
  }
  return dens;
}

// Midpoint-rule quadrature of a node-sampled density over a region: each cell
// contributes its restricted measure times the mean of its corner values
// (the bilinear interpolant evaluated at the cell center). Cells are swept in
// fixed index order and accumulated pairwise, so results are reproducible.
inline double integrate_density(const Grid& g, const std::vector<double>& dens,
                                const Region& region) {
  std::vector<double> contrib;
  contrib.reserve((std::size_t)(region.i0_hi() - region.i0_lo()) *
                  (region.i1_hi() - region.i1_lo()));
  for (int c0 = region.i0_lo(); c0 < region.i0_hi(); ++c0)
    for (int c1 = region.i1_lo(); c1 < region.i1_hi(); ++c1) {
      double w = g.cell_weight(c0, c1) * region.mask_fraction(g, c0, c1);
      if (w <= 0) continue;
      auto corners = g.cell_corners(c0, c1);
      double m =
          0.25 * (dens[corners[0]] + dens[corners[1]] + dens[corners[2]] + dens[corners[3]]);
      contrib.push_back(w * m);
    }
  return pairwise_sum(contrib);
}

}  // namespace detail

// Energy of a sampled map over a region following the convention
// energy = integral of |du|^2 = |d_x u|^2 + |d_y u|^2 (no 1/2 factor).
// Note: much of the harmonic-maps literature writes E = (1/2) int |du|^2;
// here area(u) == energy(u) for holomorphic maps, without the 1/2.
inline double energy(const MapSample& u, const Region& region) {
  return detail::integrate_density(u.grid(), detail::gradient_density(u), region);
}

inline double energy(const MapSample& u) { return energy(u, Region::all(u.grid())); }

// (integral over region of |du|^p)^(1/p) by the same quadrature
inline double lp_norm_du(const MapSample& u, double p, const Region& region) {
  require(p >= 1.0 && std::isfinite(p), "lp_norm_du requires finite p >= 1");
  std::vector<double> dens = detail::gradient_density(u);
  for (double& d : dens) d = std::pow(d, p / 2.0);
  double integral = detail::integrate_density(u.grid(), dens, region);
  return std::pow(integral, 1.0 / p);
}

inline double lp_norm_du(const MapSample& u, double p) {
  return lp_norm_du(u, p, Region::all(u.grid()));
}

// (integral over region of |u|^p)^(1/p): the L^p norm of the values
inline double lp_norm_values(const MapSample& u, double p, const Region& region) {
  require(p >= 1.0 && std::isfinite(p), "lp_norm_values requires finite p >= 1");
  const int n = u.target_dim();
  std::vector<double> dens(u.grid().node_count(), 0.0);
  for (int node = 0; node < u.grid().node_count(); ++node) {
    double s = 0;
    for (int c = 0; c < n; ++c) s += std::norm(u.value(node, c));
    dens[node] = std::pow(s, p / 2.0);
  }
  double integral = detail::integrate_density(u.grid(), dens, region);
  return std::pow(integral, 1.0 / p);
}

inline double lp_norm_values(const MapSample& u, double p) {
  return lp_norm_values(u, p, Region::all(u.grid()));
}

// Energies over a list of regions sharing one gradient evaluation.
inline std::vector<double> energies(const MapSample& u, const std::vector<Region>& regions) {
  std::vector<double> dens = detail::gradient_density(u);
  std::vector<double> out;
  out.reserve(regions.size());
  for (const Region& r : regions) out.push_back(detail::integrate_density(u.grid(), dens, r));
  return out;
}

// Unit-segment energies E_i over Z_i = Z(a+i-1, a+i); the grid must align
// whole unit segments with nodes.
inline std::vector<double> segment_energies(const MapSample& u) {
  const Grid& g = u.grid();
  double len = g.param1() - g.param0();
  int l = (int)std::lround(len);
  require(std::abs(len - l) < 1e-9 && l >= 1, "domain must span whole unit segments");
  require((g.n0() - 1) % l == 0, "resolution must align unit segments with nodes");
  std::vector<Region> regions;
  for (int i = 1; i <= l; ++i)
    regions.push_back(Region::span0(g, g.param0() + (i - 1), g.param0() + i));
  return energies(u, regions);
}

// Restriction of a sample to an axis-0 span of the grid (full second axis):
// sub-cylinders Z_i, sub-strips Theta_i, radial sub-annuli. The restricted
// grid keeps the same kind with tightened axis-0 range.
inline MapSample restrict(const MapSample& u, const Region& region) {
  const Grid& g = u.grid();
  require(!region.circle(), "restrict does not support disk-masked regions");
  require(region.i1_lo() == 0 && region.i1_hi() == (g.periodic1() ? g.n1() : g.n1() - 1),
          "restrict supports axis-0 spans only");
  int lo = region.i0_lo(), hi = region.i0_hi();
  double a = g.coord0(lo), b = g.coord0(hi);
  int n0 = hi - lo + 1;
  Grid sub = [&] {
    switch (g.kind()) {
      case GridKind::Cylinder: return Grid::cylinder(a, b, n0, g.n1());
      case GridKind::Strip: return Grid::strip(a, b, n0, g.n1());
      case GridKind::Annulus: return Grid::annulus(a, b, n0, g.n1());
      default: throw invalid_input("restrict requires a cylinder, strip or annulus grid");
    }
  }();
  const int n = u.target_dim();
  std::vector<complexd> vals((std::size_t)sub.node_count() * n);
  for (int i0 = 0; i0 < n0; ++i0)
    for (int i1 = 0; i1 < g.n1(); ++i1)
      for (int c = 0; c < n; ++c)
        vals[(std::size_t)sub.index(i0, i1) * n + c] = u.value(g.index(lo + i0, i1), c);
  return MapSample(sub, n, std::move(vals));
}

}  // namespace phk
