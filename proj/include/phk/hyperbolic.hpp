#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "phk/common.hpp"
#include "phk/sample.hpp"

namespace phk {

// Combinatorial pants decomposition: vertices are pants, edges are interior
// circles (marked = contracted to a node), tails are boundary circles and
// marked tails are punctures. Every vertex has total degree 3 (self-loops
// count twice) and the graph is connected, which forces 2g+m+b >= 3.
class PantsGraph {
 public:
  struct Edge {
    int u, v;
    bool marked = false;
  };

  PantsGraph(int vertex_count, std::vector<Edge> edges, std::vector<int> tails,
             std::vector<int> marked_tails)
      : v_(vertex_count), edges_(std::move(edges)), tails_(std::move(tails)),
        marked_tails_(std::move(marked_tails)) {
    require(v_ >= 1, "pants graph needs at least one vertex");
    std::vector<int> degree(v_, 0);
    for (const Edge& e : edges_) {
      require(e.u >= 0 && e.u < v_ && e.v >= 0 && e.v < v_, "edge endpoint out of range");
      degree[e.u] += 1;
      degree[e.v] += 1;
    }
    for (int t : tails_) {
      require(t >= 0 && t < v_, "tail vertex out of range");
      degree[t] += 1;
    }
    for (int t : marked_tails_) {
      require(t >= 0 && t < v_, "marked tail vertex out of range");
      degree[t] += 1;
    }
    for (int d : degree) require(d == 3, "every pants has exactly three ends");
    require(connected(), "pants graph must be connected");
  }

  int vertex_count() const { return v_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& tails() const { return tails_; }
  const std::vector<int>& marked_tails() const { return marked_tails_; }

  int genus() const { return (int)edges_.size() - v_ + 1; }
  int boundary_count() const { return (int)tails_.size(); }
  int marked_point_count() const { return (int)marked_tails_.size(); }

 private:
  bool connected() const {
    std::vector<int> parent(v_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const Edge& e : edges_) parent[find(e.u)] = find(e.v);
    int root = find(0);
    for (int i = 1; i < v_; ++i)
      if (find(i) != root) return false;
    return true;
  }

  int v_;
  std::vector<Edge> edges_;
  std::vector<int> tails_;
  std::vector<int> marked_tails_;
};

// Complex dimension 3g - 3 + m + 2b of the Teichmueller space of the surface
// encoded by the graph.
inline int teich_dimension(const PantsGraph& g) {
  int dim = 3 * g.genus() - 3 + g.marked_point_count() + 2 * g.boundary_count();
  require(2 * g.genus() + g.marked_point_count() + g.boundary_count() >= 3,
          "2g + m + b >= 3 is required");
  return dim;
}

// Fenchel-Nielsen coordinates: one length per tail and per edge, one twist
// per tail and per edge. Twists are stored in [0, 2pi); 2pi wraps to 0.
struct FNCoords {
  std::vector<double> tail_lengths;
  std::vector<double> edge_lengths;
  std::vector<double> tail_twists;
  std::vector<double> edge_twists;

  static double wrap_twist(double t) {
    double w = std::fmod(t, 2 * pi);
    if (w < 0) w += 2 * pi;
    if (w >= 2 * pi) w = 0;
    return w;
  }

  void validate(const PantsGraph& g) const {
    require((int)tail_lengths.size() == g.boundary_count(), "one length per tail required");
    require((int)edge_lengths.size() == (int)g.edges().size(), "one length per edge required");
    require((int)tail_twists.size() == g.boundary_count(), "one twist per tail required");
    require((int)edge_twists.size() == (int)g.edges().size(), "one twist per edge required");
    for (double l : tail_lengths) require(l > 0 && std::isfinite(l), "lengths must be positive");
    for (double l : edge_lengths) require(l > 0 && std::isfinite(l), "lengths must be positive");
    for (double t : tail_twists) require(t >= 0 && t < 2 * pi, "twists live in [0,2pi)");
    for (double t : edge_twists) require(t >= 0 && t < 2 * pi, "twists live in [0,2pi)");
  }
};

// Plumbing parameters: the gluing constants of zeta * zeta' = lambda.
// Unmarked edges carry 0 < |lambda| < 1; marked edges are nodes and carry no
// parameter. Tails carry 0 < |lambda| <= 1.
struct PlumbingParams {
  std::vector<complexd> edge_lambda;  // aligned with graph edges; ignored at marked edges
  std::vector<complexd> tail_lambda;
};

struct CollarSpec {
  double length;            // geodesic length l
  double a_star = 2.0;      // collar area constant; the universal a* of the
                            // reference literature has no published numeric
                            // value, so it stays configurable

  CollarSpec(double l, double a) : length(l), a_star(a) {
    require(l > 0 && std::isfinite(l), "collar length must be positive");
    require(a > 0 && std::isfinite(a), "collar area constant must be positive");
  }
};

// Conformal factor of the collar metric (l/2pi / cos(l rho / 2pi))^2
// (drho^2 + dtheta^2); returns the factor, not its square.
inline double collar_metric_factor(double length, double rho) {
  require(length > 0, "collar length must be positive");
  require(std::abs(rho) < pi * pi / length, "rho outside the collar domain");
  return (length / (2 * pi)) / std::cos(length * rho / (2 * pi));
}

// log R <= pi^2 / l for an annulus adjacent to a boundary circle of length l
inline double collar_log_radius_upper(double length) {
  require(length > 0, "length must be positive");
  return pi * pi / length;
}

// log R <= 2 pi^2 / l for an annulus homotopic to a closed geodesic of length l
inline double geodesic_annulus_log_radius_bound(double length) {
  require(length > 0, "length must be positive");
  return 2 * pi * pi / length;
}

// Width rho* of the collar of area a*: a* = l tan(l rho*/2pi) inverted,
// rho* = pi^2/l - (2pi/l) arctan(l/a*), valid under the l <= 1 hypothesis.
// Always >= pi^2/l - 2pi/a*.
inline double collar_width(const CollarSpec& spec) {
  if (spec.length > 1.0)
    throw invalid_input("collar width hypothesis violated: requires length <= 1");
  return pi * pi / spec.length -
         (2 * pi / spec.length) * std::atan(spec.length / spec.a_star);
}

// Hyperbolic width of the collar band rho in [rho_lo, rho_hi]: the
// antiderivative of the metric factor is log cotan(pi/4 - l rho / 4pi).
inline double trim_width(double length, double rho_lo, double rho_hi) {
  require(length > 0, "length must be positive");
  require(0 <= rho_lo && rho_lo <= rho_hi && rho_hi < pi * pi / length,
          "trim bounds must satisfy 0 <= rho_lo <= rho_hi < pi^2/l");
  auto logcot = [&](double rho) {
    double a = pi / 4 - length * rho / (4 * pi);
    return std::log(1.0 / std::tan(a));
  };
  return logcot(rho_hi) - logcot(rho_lo);
}

// Gauss curvature K = -Laplacian(log f) / f^2 of the conformal metric
// f^2 (dc0^2 + dc1^2) in the grid's flat parameter coordinates, by centered
// second differences. Defined at interior nodes; boundary nodes copy their
// nearest interior neighbor. Polar (annulus) grids are not supported since
// their parameter chart is not flat.
inline ScalarSample gauss_curvature(const ScalarSample& factor) {
  const Grid& g = factor.grid();
  require(g.kind() != GridKind::Annulus, "gauss_curvature needs a flat parameter chart");
  require(g.n0() >= 5 && g.n1() >= 5, "gauss_curvature requires resolution >= 5");
  std::vector<double> logf(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) {
    require(factor.value(i) > 0, "metric factor must be strictly positive");
    logf[i] = std::log(factor.value(i));
  }
  std::vector<double> K(g.node_count(), 0.0);
  double inv_h0sq = 1.0 / (g.h0() * g.h0());
  double inv_h1sq = 1.0 / (g.h1() * g.h1());
  bool per = g.periodic1();
  for (int i0 = 1; i0 + 1 < g.n0(); ++i0)
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      if (!per && (i1 == 0 || i1 + 1 == g.n1())) continue;
      int im = per ? (i1 + g.n1() - 1) % g.n1() : i1 - 1;
      int ip = per ? (i1 + 1) % g.n1() : i1 + 1;
      double lap = (logf[g.index(i0 - 1, i1)] - 2 * logf[g.index(i0, i1)] +
                    logf[g.index(i0 + 1, i1)]) * inv_h0sq +
                   (logf[g.index(i0, im)] - 2 * logf[g.index(i0, i1)] +
                    logf[g.index(i0, ip)]) * inv_h1sq;
      double f = factor.value(g.index(i0, i1));
      K[g.index(i0, i1)] = -lap / (f * f);
    }
  // replicate to the boundary rows/columns
  for (int i1 = 0; i1 < g.n1(); ++i1) {
    K[g.index(0, i1)] = K[g.index(1, i1)];
    K[g.index(g.n0() - 1, i1)] = K[g.index(g.n0() - 2, i1)];
  }
  if (!per)
    for (int i0 = 0; i0 < g.n0(); ++i0) {
      K[g.index(i0, 0)] = K[g.index(i0, 1)];
      K[g.index(i0, g.n1() - 1)] = K[g.index(i0, g.n1() - 2)];
    }
  return ScalarSample(g, std::move(K));
}

// Plumbing transition zeta' = lambda / zeta, so zeta * zeta' = lambda.
inline complexd plumb(complexd zeta, complexd lambda) {
  require(zeta != complexd(0, 0), "plumb requires zeta != 0");
  require(std::abs(lambda) < std::abs(zeta) && std::abs(zeta) <= 1.0,
          "plumb requires |lambda| < |zeta| <= 1");
  return lambda / zeta;
}

struct EdgeValidation {
  int edge_index;
  bool marked;
  double neck_modulus;      // log(1/|lambda|); 0 for marked edges
  bool near_node;           // modulus beyond the degeneration threshold
};

struct FamilyReport {
  bool valid = true;
  std::vector<EdgeValidation> edges;
  std::vector<std::string> problems;
  double degeneration_threshold;
};

// Range/coverage checks for a plumbing family and per-edge neck moduli.
// A node must be declared by marking the edge; lambda = 0 is rejected.
inline FamilyReport validate_family(const PantsGraph& g, const PlumbingParams& params,
                                    double degeneration_threshold = 10.0) {
  FamilyReport rep;
  rep.degeneration_threshold = degeneration_threshold;
  if ((int)params.edge_lambda.size() != (int)g.edges().size()) {
    rep.valid = false;
    rep.problems.push_back("one plumbing parameter per edge is required");
    return rep;
  }
  if ((int)params.tail_lambda.size() != g.boundary_count()) {
    rep.valid = false;
    rep.problems.push_back("one plumbing parameter per tail is required");
    return rep;
  }
  for (int i = 0; i < (int)g.edges().size(); ++i) {
    EdgeValidation ev;
    ev.edge_index = i;
    ev.marked = g.edges()[i].marked;
    ev.neck_modulus = 0.0;
    ev.near_node = false;
    if (!ev.marked) {
      double mod = std::abs(params.edge_lambda[i]);
      if (!(mod > 0.0 && mod < 1.0)) {
        rep.valid = false;
        rep.problems.push_back("edge " + std::to_string(i) +
                               ": |lambda| must lie in (0,1); declare a node via a marked edge");
      } else {
        ev.neck_modulus = std::log(1.0 / mod);
        ev.near_node = ev.neck_modulus >= degeneration_threshold;
      }
    }
    rep.edges.push_back(ev);
  }
  for (int i = 0; i < (int)params.tail_lambda.size(); ++i) {
    double mod = std::abs(params.tail_lambda[i]);
    if (!(mod > 0.0 && mod <= 1.0)) {
      rep.valid = false;
      rep.problems.push_back("tail " + std::to_string(i) + ": |lambda| must lie in (0,1]");
    }
  }
  return rep;
}

}  // namespace phk
