#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "phk/common.hpp"
#include "phk/grid.hpp"

namespace phk {

// Complex n-vector samples of a map on a Grid, node-major storage:
// values[node*n + component].
class MapSample {
 public:
  MapSample(Grid grid, int target_dim, std::vector<complexd> values)
      : grid_(std::move(grid)), n_(target_dim), values_(std::move(values)) {
    require(n_ >= 1, "target dimension must be >= 1");
    require((int)values_.size() == grid_.node_count() * n_,
            "value count must equal node count x target dimension");
    for (const auto& v : values_)
      require(std::isfinite(v.real()) && std::isfinite(v.imag()),
              "map samples must be finite");
  }

  static MapSample from_function(const Grid& g, int n,
                                 const std::function<void(double, double, complexd*)>& f) {
    std::vector<complexd> vals((std::size_t)g.node_count() * n);
    for (int i0 = 0; i0 < g.n0(); ++i0)
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        auto p = g.position(i0, i1);
        f(p[0], p[1], &vals[(std::size_t)g.index(i0, i1) * n]);
      }
    return MapSample(g, n, std::move(vals));
  }

  // scalar-target convenience
  static MapSample from_function(const Grid& g,
                                 const std::function<complexd(double, double)>& f) {
    return from_function(g, 1, [&](double x, double y, complexd* out) { out[0] = f(x, y); });
  }

  // sample in axis coordinates (r,phi on an annulus; t,theta on a cylinder)
  static MapSample from_axis_function(const Grid& g, int n,
                                      const std::function<void(double, double, complexd*)>& f) {
    std::vector<complexd> vals((std::size_t)g.node_count() * n);
    for (int i0 = 0; i0 < g.n0(); ++i0)
      for (int i1 = 0; i1 < g.n1(); ++i1)
        f(g.coord0(i0), g.coord1(i1), &vals[(std::size_t)g.index(i0, i1) * n]);
    return MapSample(g, n, std::move(vals));
  }

  const Grid& grid() const { return grid_; }
  int target_dim() const { return n_; }
  const std::vector<complexd>& values() const { return values_; }

  complexd value(int node, int comp = 0) const { return values_[(std::size_t)node * n_ + comp]; }
  const complexd* at(int node) const { return &values_[(std::size_t)node * n_]; }

 private:
  Grid grid_;
  int n_;
  std::vector<complexd> values_;
};

// Real scalar samples on a Grid (metric factors, curvature fields).
class ScalarSample {
 public:
  ScalarSample(Grid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    require((int)values_.size() == grid_.node_count(), "value count must equal node count");
  }

  static ScalarSample from_function(const Grid& g, const std::function<double(double, double)>& f) {
    std::vector<double> vals(g.node_count());
    for (int i0 = 0; i0 < g.n0(); ++i0)
      for (int i1 = 0; i1 < g.n1(); ++i1) vals[g.index(i0, i1)] = f(g.coord0(i0), g.coord1(i1));
    return ScalarSample(g, std::move(vals));
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(int node) const { return values_[node]; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

namespace detail {

// operator 2-norm of a small matrix via a few power iterations on M^T M
inline double op_norm(const std::vector<double>& m, int dim) {
  std::vector<double> v(dim, 1.0 / std::sqrt((double)dim)), w(dim), u(dim);
  double s = 0.0;
  for (int it = 0; it < 60; ++it) {
    for (int i = 0; i < dim; ++i) {
      double a = 0;
      for (int j = 0; j < dim; ++j) a += m[i * dim + j] * v[j];
      w[i] = a;
    }
    for (int j = 0; j < dim; ++j) {
      double a = 0;
      for (int i = 0; i < dim; ++i) a += m[i * dim + j] * w[i];
      u[j] = a;
    }
    double nrm = 0;
    for (double x : u) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0) return 0;
    s = std::sqrt(nrm);
    for (int j = 0; j < dim; ++j) v[j] = u[j] / nrm;
  }
  return s;
}

}  // namespace detail

// Per-node linear complex structure: a real 2n x 2n endomorphism J with
// J^2 = -I. Real coordinates interleave (Re u_0, Im u_0, ..., Re u_{n-1},
// Im u_{n-1}), so the standard structure J_st is block-diagonal with
// [[0,-1],[1,0]] blocks.
class StructureField {
 public:
  static constexpr double structure_tol = 1e-10;

  StructureField(Grid grid, int target_dim, std::vector<double> matrices)
      : grid_(std::move(grid)), n_(target_dim), mats_(std::move(matrices)) {
    int d = 2 * n_;
    require((int)mats_.size() == grid_.node_count() * d * d,
            "matrix count must equal node count x (2n)^2");
    validate();
  }

  static StructureField standard(const Grid& g, int n) {
    int d = 2 * n;
    std::vector<double> mats((std::size_t)g.node_count() * d * d, 0.0);
    for (int node = 0; node < g.node_count(); ++node) {
      double* m = &mats[(std::size_t)node * d * d];
      for (int k = 0; k < n; ++k) {
        m[(2 * k) * d + (2 * k + 1)] = -1.0;
        m[(2 * k + 1) * d + (2 * k)] = 1.0;
      }
    }
    return StructureField(g, n, std::move(mats));
  }

  static StructureField from_function(
      const Grid& g, int n, const std::function<void(double, double, double*)>& fill) {
    int d = 2 * n;
    std::vector<double> mats((std::size_t)g.node_count() * d * d, 0.0);
    for (int i0 = 0; i0 < g.n0(); ++i0)
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        auto p = g.position(i0, i1);
        fill(p[0], p[1], &mats[(std::size_t)g.index(i0, i1) * d * d]);
      }
    return StructureField(g, n, std::move(mats));
  }

  const Grid& grid() const { return grid_; }
  int target_dim() const { return n_; }
  int dim() const { return 2 * n_; }
  const double* at(int node) const { return &mats_[(std::size_t)node * dim() * dim()]; }

  // apply J(node) to a complex n-vector through the real identification
  void apply(int node, const complexd* in, complexd* out) const {
    int d = dim();
    const double* m = at(node);
    for (int i = 0; i < n_; ++i) {
      double re = 0, im = 0;
      for (int j = 0; j < n_; ++j) {
        double xr = in[j].real(), xi = in[j].imag();
        re += m[(2 * i) * d + 2 * j] * xr + m[(2 * i) * d + 2 * j + 1] * xi;
        im += m[(2 * i + 1) * d + 2 * j] * xr + m[(2 * i + 1) * d + 2 * j + 1] * xi;
      }
      out[i] = complexd(re, im);
    }
  }

  // max over nodes of || J(node) - J_st ||_2
  double max_deviation_from_standard() const {
    int d = dim();
    std::vector<double> diff(d * d);
    double worst = 0;
    for (int node = 0; node < grid_.node_count(); ++node) {
      const double* m = at(node);
      for (int i = 0; i < d * d; ++i) diff[i] = m[i];
      for (int k = 0; k < n_; ++k) {
        diff[(2 * k) * d + (2 * k + 1)] += 1.0;
        diff[(2 * k + 1) * d + (2 * k)] -= 1.0;
      }
      worst = std::max(worst, detail::op_norm(diff, d));
    }
    return worst;
  }

 private:
  void validate() const {
    int d = dim();
    std::vector<double> sq(d * d);
    for (int node = 0; node < grid_.node_count(); ++node) {
      const double* m = at(node);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double a = 0;
          for (int k = 0; k < d; ++k) a += m[i * d + k] * m[k * d + j];
          sq[i * d + j] = a + (i == j ? 1.0 : 0.0);
        }
      if (detail::op_norm(sq, d) > structure_tol)
        throw invalid_input("structure field violates J^2 = -I beyond structure_tol");
    }
  }

  Grid grid_;
  int n_;
  std::vector<double> mats_;
};

}  // namespace phk
