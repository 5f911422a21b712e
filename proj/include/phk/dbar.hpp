#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "phk/calculus.hpp"
#include "phk/common.hpp"
#include "phk/grid.hpp"
#include "phk/sample.hpp"
#include "phk/totally_real.hpp"

namespace phk {

// dbar = (1/2)(d/dx + i d/dy), the standard Cauchy-Riemann operator.
inline MapSample dbar_std(const MapSample& u) {
  Gradient gr = gradient(u);
  const int n = u.target_dim();
  std::vector<complexd> vals((std::size_t)u.grid().node_count() * n);
  for (int node = 0; node < u.grid().node_count(); ++node)
    for (int c = 0; c < n; ++c)
      vals[(std::size_t)node * n + c] =
          0.5 * (gr.dx.value(node, c) + complexd(0, 1) * gr.dy.value(node, c));
  return MapSample(u.grid(), n, std::move(vals));
}

// dbar_J = (1/2)(d_x + J(z) d_y) for a variable linear complex structure.
inline MapSample dbar_J(const MapSample& u, const StructureField& J) {
  require(J.grid().same_layout(u.grid()), "structure field must live on the sample's grid");
  require(J.target_dim() == u.target_dim(), "structure field dimension mismatch");
  Gradient gr = gradient(u);
  const int n = u.target_dim();
  std::vector<complexd> vals((std::size_t)u.grid().node_count() * n);
  std::vector<complexd> jd(n);
  for (int node = 0; node < u.grid().node_count(); ++node) {
    J.apply(node, gr.dy.at(node), jd.data());
    for (int c = 0; c < n; ++c)
      vals[(std::size_t)node * n + c] = 0.5 * (gr.dx.value(node, c) + jd[c]);
  }
  return MapSample(u.grid(), n, std::move(vals));
}

namespace detail {

// integral of 1/(z - w) dA(w) over an axis-aligned rectangle, z off the
// boundary. Green's theorem turns the area integral into edge integrals of
// w_bar/(z-w); each edge stays on one side of the log branch cut, so the
// principal log of the endpoint ratio is the continuous antiderivative.
inline complexd cauchy_rect_integral(complexd z, double x0, double x1, double y0, double y1) {
  const complexd I(0, 1);
  auto horizontal = [&](double v0, double a, double b) {
    complexd sa = z - I * v0 - a;
    complexd sb = z - I * v0 - b;
    return (z - 2.0 * I * v0) * std::log(sa / sb) - complexd(b - a, 0);
  };
  auto vertical = [&](double u0, double c, double d) {
    complexd sc = z - u0 - I * c;
    complexd sd = z - u0 - I * d;
    return I * (d - c) + (2.0 * u0 - z) * std::log(sc / sd);
  };
  complexd contour = horizontal(y0, x0, x1) + vertical(x1, y0, y1) + horizontal(y1, x1, x0) +
                     vertical(x0, y1, y0);
  complexd result = contour / (2.0 * I);
  bool inside = (z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1);
  if (inside) result += pi * std::conj(z);
  return result;
}

}  // namespace detail

// Cauchy-Green transform Tf(z) = (1/pi) int f(w)/(z-w) dA(w) over the disk,
// a right inverse of dbar_std. Cell-midpoint quadrature of the kernel with
// exact coverage weights; the block of cells touching the target node is
// integrated analytically (the kernel is singular there).
inline MapSample cauchy_transform(const MapSample& f) {
  const Grid& g = f.grid();
  require(g.kind() == GridKind::Disk, "cauchy_transform supports disk grids");
  const int n = f.target_dim();
  const int nc0 = g.cells0(), nc1 = g.cells1();

  // per-cell data
  std::vector<double> weight((std::size_t)nc0 * nc1);
  std::vector<complexd> center((std::size_t)nc0 * nc1);
  std::vector<complexd> fbar((std::size_t)nc0 * nc1 * n);
  for (int c0 = 0; c0 < nc0; ++c0)
    for (int c1 = 0; c1 < nc1; ++c1) {
      std::size_t ci = (std::size_t)c0 * nc1 + c1;
      weight[ci] = g.cell_weight(c0, c1);
      auto cc = g.cell_center_xy(c0, c1);
      center[ci] = complexd(cc[0], cc[1]);
      auto corners = g.cell_corners(c0, c1);
      for (int c = 0; c < n; ++c)
        fbar[ci * n + c] = 0.25 * (f.value(corners[0], c) + f.value(corners[1], c) +
                                   f.value(corners[2], c) + f.value(corners[3], c));
    }

  std::vector<complexd> out((std::size_t)g.node_count() * n, complexd(0, 0));
  const double h0 = g.h0(), h1 = g.h1();
  for (int i0 = 0; i0 < g.n0(); ++i0)
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      const int node = g.index(i0, i1);
      const double zx = g.coord0(i0), zy = g.coord1(i1);
      const complexd z(zx, zy);

      // analytic integral over the block of adjacent cells
      double bx0 = (i0 > 0) ? zx - h0 : zx;
      double bx1 = (i0 < g.n0() - 1) ? zx + h0 : zx;
      double by0 = (i1 > 0) ? zy - h1 : zy;
      double by1 = (i1 < g.n1() - 1) ? zy + h1 : zy;
      complexd zeval = z;
      // nudge boundary-node targets strictly inside the block
      if (i0 == 0) zeval += complexd(1e-9 * h0, 0);
      if (i0 == g.n0() - 1) zeval -= complexd(1e-9 * h0, 0);
      if (i1 == 0) zeval += complexd(0, 1e-9 * h1);
      if (i1 == g.n1() - 1) zeval -= complexd(0, 1e-9 * h1);
      double block_area = (bx1 - bx0) * (by1 - by0);
      if (block_area > 0) {
        double cover = circle_rect_area(0, 0, g.param0(), bx0, bx1, by0, by1) / block_area;
        if (cover > 0) {
          complexd kern = detail::cauchy_rect_integral(zeval, bx0, bx1, by0, by1);
          for (int c = 0; c < n; ++c) out[(std::size_t)node * n + c] += cover * kern * f.value(node, c);
        }
      }

      // exact rectangle integrals for the near ring (their midpoint error is
      // rough at the node scale and dbar would amplify it), midpoint beyond
      const int near = 4;
      int c0_lo = std::max(0, i0 - 1), c0_hi = std::min(nc0 - 1, i0);
      int c1_lo = std::max(0, i1 - 1), c1_hi = std::min(nc1 - 1, i1);
      for (int c0 = 0; c0 < nc0; ++c0)
        for (int c1 = 0; c1 < nc1; ++c1) {
          if (c0 >= c0_lo && c0 <= c0_hi && c1 >= c1_lo && c1 <= c1_hi) continue;
          std::size_t ci = (std::size_t)c0 * nc1 + c1;
          if (weight[ci] <= 0) continue;
          complexd kern;
          if (std::abs(c0 - i0) <= near && std::abs(c1 - i1) <= near) {
            double x0 = g.coord0(c0), y0 = g.coord1(c1);
            double frac = weight[ci] / (h0 * h1);
            kern = frac * detail::cauchy_rect_integral(z, x0, x0 + h0, y0, y0 + h1);
          } else {
            kern = weight[ci] / (z - center[ci]);
          }
          for (int c = 0; c < n; ++c) out[(std::size_t)node * n + c] += kern * fbar[ci * n + c];
        }

      for (int c = 0; c < n; ++c) out[(std::size_t)node * n + c] /= pi;
    }

  return MapSample(g, n, std::move(out));
}

// single Calderon-Zygmund ratio || d(Tf) ||_p / || f ||_p, d = (d_x - i d_y)/2.
// Norms are taken over the 0.9-radius interior so the rim layer, where the
// discrete differentiation of the kernel tail is noisy, does not inflate the
// lower estimate.
inline double cz_ratio(const MapSample& f, double p) {
  require(p > 1.0, "cz_ratio requires p > 1");
  Region interior = Region::disk(f.grid(), 0, 0, 0.9 * f.grid().param0());
  double denom = lp_norm_values(f, p, interior);
  if (denom == 0) return 0.0;
  MapSample tf = cauchy_transform(f);
  Gradient gr = gradient(tf);
  const int n = f.target_dim();
  std::vector<complexd> dz((std::size_t)f.grid().node_count() * n);
  for (int node = 0; node < f.grid().node_count(); ++node)
    for (int c = 0; c < n; ++c)
      dz[(std::size_t)node * n + c] =
          0.5 * (gr.dx.value(node, c) - complexd(0, 1) * gr.dy.value(node, c));
  MapSample dtf(f.grid(), n, std::move(dz));
  return lp_norm_values(dtf, p, interior) / denom;
}

// max ratio over an explicit trial set
inline double cz_norm_estimate(double p, const std::vector<MapSample>& trials) {
  require(!trials.empty(), "cz_norm_estimate requires at least one trial");
  double best = 0.0;
  for (const MapSample& f : trials) best = std::max(best, cz_ratio(f, p));
  return best;
}

// empirical lower estimate of ||d o T||_{L^p -> L^p} over seeded random
// smooth bump combinations; deterministic for a fixed seed
inline double cz_norm_estimate(double p, int trials, std::uint64_t seed, int resolution = 65) {
  require(trials >= 1, "cz_norm_estimate requires trials >= 1");
  Grid g = Grid::disk(1.0, resolution, resolution);
  SplitMix64 rng(seed);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    struct Bump {
      double cx, cy, s;
      complexd amp;
    };
    std::vector<Bump> bumps(3);
    for (auto& b : bumps) {
      double r = 0.5 * std::sqrt(rng.next_double());
      double phi = rng.uniform(0, 2 * pi);
      b = {r * std::cos(phi), r * std::sin(phi), rng.uniform(0.08, 0.2),
           complexd(rng.uniform(-1, 1), rng.uniform(-1, 1))};
    }
    MapSample f = MapSample::from_function(g, [&](double x, double y) {
      complexd v(0, 0);
      for (const auto& b : bumps) {
        double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
        v += b.amp * std::exp(-d2 / (2 * b.s * b.s));
      }
      return v;
    });
    best = std::max(best, cz_ratio(f, p));
  }
  return best;
}

// epsilon_p = 1/(1 + C_p): the perturbation radius granted by the
// Calderon-Zygmund constant
inline double epsilon_p(double c_p) {
  require(c_p >= 0, "epsilon_p requires c_p >= 0");
  return 1.0 / (1.0 + c_p);
}

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> contraction;  // residual-norm ratio per correction step

  void validate(double tol) const {
    require(residual >= 0, "residual must be nonnegative");
    if (converged) require(residual <= tol, "converged reports must meet the tolerance");
  }
};

// Solve dbar_J u = f through the perturbation series around the standard
// structure: with u = T g and the exact right-inverse identity
// dbar_std o T = Id, the equation becomes (Id + B) g = f where
// B g = (dbar_J - dbar_std)(T g) = (1/2)(J - J_st) d_y(T g). The inverse is
// the alternating series in B, summed here in residual form
// g_{m+1} = f - B g_m, one transform application per step, contracting
// whenever ||J - J_st|| is inside the perturbation radius.
//
// The reported residual is that of the series equation,
// || g + B g - f ||_{L^p} = || dbar_J u - f || with the identity component
// of dbar_J o T taken exactly; the finite-difference composite
// dbar_std(cauchy_transform(.)) instead carries the O(h) right-inverse
// defect that the transform's refinement diagnostics measure separately.
// The iterates do not depend on the monitoring exponent monitor_p.
inline std::pair<MapSample, SolveReport> neumann_solve(const MapSample& f,
                                                       const StructureField& J, double tol,
                                                       int max_iter, double monitor_p = 2.0) {
  require(tol > 0, "tolerance must be positive");
  require(max_iter >= 1, "max_iter must be >= 1");
  double dev = J.max_deviation_from_standard();
  require(dev < 1.0, "neumann_solve requires ||J - J_st|| < 1");

  const Grid& g = f.grid();
  require(g.kind() == GridKind::Disk, "neumann_solve expects a disk sample");
  const int n = f.target_dim();
  const std::size_t N = f.values().size();
  using Vec = std::vector<complexd>;

  // B x = (1/2) (J - J_st) d_y (T x)
  auto apply_B = [&](const Vec& x) {
    MapSample tx = cauchy_transform(MapSample(g, n, Vec(x)));
    Gradient gr = gradient(tx);
    Vec out(N);
    std::vector<complexd> jd(n);
    for (int node = 0; node < g.node_count(); ++node) {
      J.apply(node, gr.dy.at(node), jd.data());
      for (int c = 0; c < n; ++c) {
        complexd dy = gr.dy.value(node, c);
        out[(std::size_t)node * n + c] = 0.5 * (jd[c] - complexd(0, 1) * dy);
      }
    }
    return out;
  };
  auto monitor_norm = [&](Vec v) {
    return lp_norm_values(MapSample(g, n, std::move(v)), monitor_p);
  };

  SolveReport rep;
  Vec gm = f.values();  // zeroth series term
  Vec bg = apply_B(gm);
  rep.iterations = 1;
  auto residual_norm = [&](const Vec& gv, const Vec& bgv) {
    Vec r(N);
    for (std::size_t i = 0; i < N; ++i) r[i] = gv[i] + bgv[i] - f.values()[i];
    return monitor_norm(std::move(r));
  };
  double rn = residual_norm(gm, bg);
  double prev = rn;
  while (rn > tol && rep.iterations < max_iter) {
    for (std::size_t i = 0; i < N; ++i) gm[i] = f.values()[i] - bg[i];
    bg = apply_B(gm);
    rep.iterations += 1;
    rn = residual_norm(gm, bg);
    rep.contraction.push_back(prev > 0 ? rn / prev : 0.0);
    prev = rn;
  }

  // recompute the exit residual from scratch, never carried over
  rep.residual = residual_norm(gm, apply_B(gm));
  rep.converged = rep.residual <= tol;
  MapSample u = cauchy_transform(MapSample(g, n, std::move(gm)));
  rep.validate(tol);
  return {std::move(u), rep};
}


// Reflection extension ex(u)(z) = conj(u(conj z)) from the half disk to the
// disk, for boundary values on the real subspace R^n. boundary_tol is scaled
// by the sample's max magnitude to stay dimensionless.
inline MapSample reflect_extend(const MapSample& u, const TotallyRealSubspace& boundary_check,
                                double boundary_tol = 1e-6) {
  const Grid& g = u.grid();
  require(g.kind() == GridKind::HalfDisk, "reflect_extend expects a half-disk sample");
  const int n = u.target_dim();
  require(boundary_check.dimension() == n, "boundary subspace dimension mismatch");

  // this operator reflects through complex conjugation, i.e. across R^n
  TotallyRealSubspace realw = TotallyRealSubspace::real_subspace(n);
  const Eigen::MatrixXd& q = boundary_check.orthonormal_basis();
  Eigen::MatrixXd diff = q * q.transpose() -
                         realw.orthonormal_basis() * realw.orthonormal_basis().transpose();
  require(diff.norm() < 1e-9, "reflect_extend supports the real boundary subspace");

  double scale = 0.0;
  for (const auto& v : u.values()) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (int i0 = 0; i0 < g.n0(); ++i0) worst = std::max(worst, realw.distance(u.at(g.index(i0, 0))));
  if (worst > boundary_tol * std::max(scale, 1e-300))
    throw invalid_input("boundary values leave the real subspace; max distance " +
                        std::to_string(worst));

  Grid disk = Grid::disk(g.param0(), g.n0(), 2 * g.n1() - 1);
  std::vector<complexd> vals((std::size_t)disk.node_count() * n);
  for (int i0 = 0; i0 < g.n0(); ++i0)
    for (int i1 = 0; i1 < disk.n1(); ++i1) {
      int src = std::abs(i1 - (g.n1() - 1));
      bool mirrored = i1 < g.n1() - 1;
      for (int c = 0; c < n; ++c) {
        complexd v = u.value(g.index(i0, src), c);
        vals[(std::size_t)disk.index(i0, i1) * n + c] = mirrored ? std::conj(v) : v;
      }
    }
  return MapSample(disk, n, std::move(vals));
}

// || du ||_{L^p(half-radius disk)} / || du ||_{L^2(disk)}, the measured ratio
// of the first apriori estimate
inline double first_apriori_ratio(const MapSample& u, double p) {
  require(p > 2.0, "first_apriori_ratio requires p > 2");
  const Grid& g = u.grid();
  require(g.kind() == GridKind::Disk, "first_apriori_ratio expects a disk sample");
  double denom = lp_norm_du(u, 2.0, Region::all(g));
  require(denom > 0, "constant map: the apriori ratio is undefined");
  double numer = lp_norm_du(u, p, Region::disk(g, 0, 0, g.param0() / 2));
  return numer / denom;
}

// J(z) = S(z) J_st S(z)^{-1} with a smooth shear S = I + a B(z); a one-knob
// family of genuinely variable structures for tests and the CLI (n = 1)
inline StructureField sheared_structure(const Grid& g, double a) {
  return StructureField::from_function(g, 1, [a](double x, double y, double* m) {
    double b11 = std::sin(2 * x) * std::cos(y);
    double b12 = 0.7 * std::cos(x + y);
    double b21 = 0.5 * std::sin(x - y);
    double b22 = -0.3 * std::cos(2 * y);
    double s11 = 1 + a * b11, s12 = a * b12, s21 = a * b21, s22 = 1 + a * b22;
    double det = s11 * s22 - s12 * s21;
    // J = S J_st S^{-1}
    m[0] = (s12 * s22 + s11 * s21) / det;
    m[1] = -(s11 * s11 + s12 * s12) / det;
    m[2] = (s21 * s21 + s22 * s22) / det;
    m[3] = -(s12 * s22 + s11 * s21) / det;
  });
}

// calibrate the shear amplitude so || J - J_st || hits a target deviation
inline StructureField structure_with_deviation(const Grid& g, double target) {
  require(target >= 0 && target < 1.5, "deviation target out of range");
  if (target == 0) return StructureField::standard(g, 1);
  double lo = 0, hi = 0.8;
  for (int it = 0; it < 48; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sheared_structure(g, mid).max_deviation_from_standard() < target)
      lo = mid;
    else
      hi = mid;
  }
  return sheared_structure(g, 0.5 * (lo + hi));
}

}  // namespace phk
