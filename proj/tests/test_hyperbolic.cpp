#include <catch2/catch.hpp>

#include <cmath>

#include "phk/calculus.hpp"
#include "phk/hyperbolic.hpp"

using namespace phk;

namespace {

PantsGraph pants() { return PantsGraph(1, {}, {0, 0, 0}, {}); }

PantsGraph marked_torus() { return PantsGraph(1, {{0, 0, false}}, {}, {0}); }

PantsGraph genus2() {
  return PantsGraph(2, {{0, 1, false}, {0, 1, false}, {0, 1, false}}, {}, {});
}

}  // namespace

TEST_CASE("teichmueller dimension 3g-3+m+2b") {
  REQUIRE(teich_dimension(pants()) == 3);
  REQUIRE(teich_dimension(marked_torus()) == 1);
  REQUIRE(teich_dimension(genus2()) == 3);
}

TEST_CASE("teich dimension is invariant under regluing with fixed (g,m,b)") {
  // two different closed surfaces from 4 pants: 3V = 2E forces E = 6, g = 3
  PantsGraph chain(4,
                   {{0, 1, false}, {0, 1, false}, {1, 2, false}, {2, 3, false}, {2, 3, false},
                    {3, 0, false}},
                   {}, {});
  PantsGraph loops(4,
                   {{0, 0, false}, {0, 1, false}, {1, 2, false}, {1, 2, false}, {2, 3, false},
                    {3, 3, false}},
                   {}, {});
  REQUIRE(chain.genus() == 3);
  REQUIRE(loops.genus() == 3);
  REQUIRE(teich_dimension(chain) == teich_dimension(loops));
}

TEST_CASE("pants graph invariants") {
  REQUIRE_THROWS_AS(PantsGraph(1, {}, {0, 0}, {}), invalid_input);         // degree 2
  REQUIRE_THROWS_AS(PantsGraph(1, {}, {0, 0, 0, 0}, {}), invalid_input);   // degree 4
  REQUIRE_THROWS_AS(PantsGraph(2, {{0, 5, false}}, {0, 0}, {1, 1}), invalid_input);
  REQUIRE_THROWS_AS(PantsGraph(2, {}, {0, 0, 0}, {1, 1, 1}), invalid_input);  // disconnected
}

TEST_CASE("fenchel-nielsen coordinate validation") {
  PantsGraph g = marked_torus();
  FNCoords fn;
  fn.edge_lengths = {0.8};
  fn.edge_twists = {FNCoords::wrap_twist(2 * pi)};  // ties at 2pi wrap to 0
  REQUIRE(fn.edge_twists[0] == 0.0);
  fn.tail_lengths = {};
  fn.tail_twists = {};
  REQUIRE_NOTHROW(fn.validate(g));
  REQUIRE(FNCoords::wrap_twist(-pi / 2) == Approx(3 * pi / 2));

  fn.edge_lengths = {-1.0};
  REQUIRE_THROWS_AS(fn.validate(g), invalid_input);
}

TEST_CASE("collar metric factor") {
  REQUIRE(collar_metric_factor(2 * pi, 0.0) == Approx(1.0));
  REQUIRE(collar_metric_factor(1.0, 0.0) == Approx(1.0 / (2 * pi)));
  // increases monotonically to +infinity toward the collar edge
  double prev = 0;
  for (double frac : {0.0, 0.5, 0.9, 0.99, 0.9999}) {
    double f = collar_metric_factor(1.0, frac * pi * pi);
    REQUIRE(f > prev);
    prev = f;
  }
  REQUIRE(prev > 1e3);
  REQUIRE_THROWS_AS(collar_metric_factor(1.0, pi * pi), invalid_input);
}

TEST_CASE("gauss curvature: flat, collar and Poincare disk") {
  // flat factor
  {
    Grid g = Grid::strip(-1, 1, 41, 7);
    ScalarSample f(g, std::vector<double>(g.node_count(), 1.0));
    ScalarSample K = gauss_curvature(f);
    for (double k : K.values()) REQUIRE(std::abs(k) < 1e-10);
  }
  // collar factor at unit-test resolution (acceptance reruns at h = 1e-3)
  {
    Grid g = Grid::strip(-1, 1, 401, 7);
    ScalarSample f = ScalarSample::from_function(
        g, [](double rho, double) { return collar_metric_factor(1.0, rho); });
    ScalarSample K = gauss_curvature(f);
    for (int i0 = 1; i0 + 1 < g.n0(); ++i0)
      REQUIRE(K.value(g.index(i0, 3)) == Approx(-1.0).margin(2e-4));
  }
  // Poincare disk factor 2/(1-x^2-y^2); the bounding square of a radius-0.6
  // grid stays inside the unit disk, so the factor is positive everywhere
  {
    Grid g = Grid::disk(0.6, 321, 321);
    ScalarSample f = ScalarSample::from_function(
        g, [](double x, double y) { return 2.0 / (1.0 - x * x - y * y); });
    ScalarSample K = gauss_curvature(f);
    for (int i0 = 1; i0 + 1 < g.n0(); ++i0)
      for (int i1 = 1; i1 + 1 < g.n1(); ++i1)
        REQUIRE(K.value(g.index(i0, i1)) == Approx(-1.0).margin(2e-4));
  }
  // nonpositive factors are rejected
  Grid g = Grid::strip(0, 1, 8, 8);
  REQUIRE_THROWS_AS(gauss_curvature(ScalarSample(g, std::vector<double>(g.node_count(), -1.0))),
                    invalid_input);
}

TEST_CASE("conformal radius bounds of the collar") {
  REQUIRE(collar_log_radius_upper(pi) == Approx(pi));
  REQUIRE(collar_log_radius_upper(1.0) == Approx(pi * pi));
  REQUIRE(collar_log_radius_upper(0.1) == Approx(10 * pi * pi));
  for (double l : {0.2, 0.7, 3.0})
    REQUIRE(geodesic_annulus_log_radius_bound(l) == Approx(2 * collar_log_radius_upper(l)));
}

TEST_CASE("collar width formula and lower bound") {
  double w = collar_width(CollarSpec(1.0, 2.0));
  REQUIRE(w == Approx(pi * pi - 2 * pi * std::atan(0.5)).epsilon(1e-12));
  REQUIRE(w >= pi * pi - pi);

  // lower bound pi^2/l - 2pi/a* holds with zero violations; the gap between
  // the conformal-radius upper bound and this lower bound is exactly 2pi/a*
  for (int i = 1; i <= 100; ++i) {
    double l = 0.01 * i;
    CollarSpec spec(l, 2.0);
    double lower = pi * pi / l - 2 * pi / spec.a_star;
    REQUIRE(collar_width(spec) >= lower);
    REQUIRE(collar_log_radius_upper(l) - lower == Approx(2 * pi / spec.a_star));
  }

  // width scales like pi^2 / l as l -> 0
  REQUIRE(collar_width(CollarSpec(1e-3, 2.0)) * 1e-3 == Approx(pi * pi).margin(1e-2));
  // a* -> infinity recovers the full collar
  REQUIRE(collar_width(CollarSpec(0.5, 1e9)) == Approx(pi * pi / 0.5).margin(1e-6));

  REQUIRE_THROWS_WITH(collar_width(CollarSpec(1.5, 2.0)),
                      Catch::Contains("hypothesis violated"));
}

TEST_CASE("trim width: endpoints, small-length limit, quadrature oracle") {
  REQUIRE(trim_width(0.5, 3.0, 3.0) == 0.0);

  // the small-l limit log(1 + a*/2pi)
  {
    double l = 0.01, a_star = 2.0;
    double rho_hi = pi * pi / l - 2 * pi / a_star;
    double L = trim_width(l, rho_hi - 1.0, rho_hi);
    REQUIRE(L == Approx(std::log(1.0 + a_star / (2 * pi))).margin(1e-3));
  }

  // agreement with Simpson quadrature of the metric factor
  for (double l : {0.3, 0.8}) {
    double rho_lo = 1.0, rho_hi = 0.8 * pi * pi / l;
    const int m = 20000;  // even
    double h = (rho_hi - rho_lo) / m;
    double s = collar_metric_factor(l, rho_lo) + collar_metric_factor(l, rho_hi);
    for (int i = 1; i < m; ++i)
      s += collar_metric_factor(l, rho_lo + i * h) * (i % 2 ? 4.0 : 2.0);
    double oracle = s * h / 3.0;
    REQUIRE(trim_width(l, rho_lo, rho_hi) == Approx(oracle).margin(1e-8));
  }

  REQUIRE_THROWS_AS(trim_width(1.0, -0.5, 1.0), invalid_input);
  REQUIRE_THROWS_AS(trim_width(1.0, 0.0, pi * pi), invalid_input);
}

TEST_CASE("plumbing transition") {
  REQUIRE(plumb(complexd(0.5, 0), complexd(0.25, 0)) == complexd(0.5, 0));
  complexd z(0.3, 0.4), l(0.05, -0.02);
  complexd w = plumb(z, l);
  REQUIRE(std::abs(z * w - l) < 1e-15);
  REQUIRE(std::abs(plumb(w, l) - z) < 1e-15);  // involution

  complexd zc = std::polar(1.0, 0.7);
  REQUIRE(std::abs(plumb(zc, complexd(0.1, 0)) - complexd(0.1, 0) * std::conj(zc)) < 1e-15);
  REQUIRE(std::abs(std::abs(plumb(zc, complexd(0.1, 0))) - 0.1) < 1e-15);

  // real dyadic data keeps the product constraint and involution bit-exact
  complexd zd(0.5, 0);
  REQUIRE(plumb(zd, complexd(0.25, 0)) * zd == complexd(0.25, 0));
  REQUIRE(plumb(plumb(zd, complexd(0.25, 0)), complexd(0.25, 0)) == zd);

  REQUIRE_THROWS_AS(plumb(complexd(0, 0), complexd(0.1, 0)), invalid_input);
  REQUIRE_THROWS_AS(plumb(complexd(0.1, 0), complexd(0.2, 0)), invalid_input);
}

TEST_CASE("plumbing family validation") {
  PantsGraph g = genus2();
  PlumbingParams p;
  double lam = std::exp(-1.0);
  p.edge_lambda = {complexd(lam, 0), complexd(lam, 0), complexd(lam, 0)};
  p.tail_lambda = {};
  FamilyReport rep = validate_family(g, p);
  REQUIRE(rep.valid);
  for (const auto& e : rep.edges) {
    REQUIRE(e.neck_modulus == Approx(1.0));
    REQUIRE_FALSE(e.near_node);
  }

  // lambda = 0 is rejected: a node must be a marked edge
  p.edge_lambda[1] = complexd(0, 0);
  FamilyReport bad = validate_family(g, p);
  REQUIRE_FALSE(bad.valid);

  // marked edges carry no parameter and stay valid
  PantsGraph gm(2, {{0, 1, false}, {0, 1, true}, {0, 1, false}}, {}, {});
  FamilyReport repm = validate_family(gm, p);
  REQUIRE(repm.valid);
  REQUIRE(repm.edges[1].marked);

  // missing parameters are reported
  PlumbingParams missing;
  missing.tail_lambda = {};
  REQUIRE_FALSE(validate_family(g, missing).valid);

  // a degenerating sequence |lambda_n| = e^{-n} has neck modulus n and is
  // eventually flagged
  for (int n = 1; n <= 14; ++n) {
    PlumbingParams q;
    double mod = std::exp((double)-n);
    q.edge_lambda = {complexd(mod, 0), complexd(mod, 0), complexd(mod, 0)};
    q.tail_lambda = {};
    FamilyReport r = validate_family(g, q);
    REQUIRE(r.edges[0].neck_modulus == Approx((double)n));
    REQUIRE(r.edges[0].near_node == (n >= 10));
  }
}
