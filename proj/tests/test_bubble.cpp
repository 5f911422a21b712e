#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "phk/bubble.hpp"
#include "phk/calculus.hpp"

using namespace phk;

namespace {

// concentration profile with nonvanishing derivative at the origin,
// supported in |z| <= rho
complexd profile(complexd z, double rho = 1.1) {
  double u = std::norm(z) / (rho * rho);
  if (u >= 1.0) return complexd(0, 0);
  double w = (1 - u) * (1 - u) * (1 - u);
  return z * w;
}

// profile with its gradient mass at mid-radius: the radius collecting a
// fifth of its energy sits near 0.7 of the scale, inside the factor-two
// tracking window
complexd ring_profile(complexd z, double rho = 1.5) {
  double u = std::norm(z) / (rho * rho);
  if (u >= 1.0) return complexd(0, 0);
  double w = u * u * (1 - u) * (1 - u) * (1 - u);
  return 9.0 * z * w;
}

MapSample concentrated(const Grid& g, double scale, complexd at = complexd(0, 0)) {
  return MapSample::from_function(g, [&](double x, double y) {
    return profile((complexd(x, y) - at) / scale);
  });
}

MapSample ring_concentrated(const Grid& g, double scale, complexd at = complexd(0, 0)) {
  return MapSample::from_function(g, [&](double x, double y) {
    return ring_profile((complexd(x, y) - at) / scale);
  });
}

}  // namespace

TEST_CASE("patch cover multiplicity and density") {
  Grid g = Grid::disk(1.0, 97, 97);
  CoverSpec cover = patch_cover(g, 0.5);
  REQUIRE(cover.max_multiplicity() >= 1);
  REQUIRE(cover.max_multiplicity() <= 3);

  // halving the scale roughly quadruples the disk count
  CoverSpec fine = patch_cover(g, 0.25);
  double ratio = (double)fine.disks().size() / (double)cover.disks().size();
  REQUIRE(ratio >= 4.0 * 0.7);
  REQUIRE(ratio <= 4.0 * 1.3);

  // a domain smaller than the patch scale needs one disk
  Grid small = Grid::disk(0.1, 17, 17);
  CoverSpec one = patch_cover(small, 0.5 * 0.45);
  REQUIRE(one.disks().size() == 1);
  REQUIRE(patch_cover(g, 3.0).disks().size() == 1);

  REQUIRE_THROWS_AS(patch_cover(g, 10.0), invalid_input);
  REQUIRE_THROWS_AS(patch_cover(g, 0.01), invalid_input);
}

TEST_CASE("bubble point detection") {
  Grid g = Grid::disk(1.0, 257, 257);
  double h = g.h0();

  double Eg = energy(ring_concentrated(g, 0.5));
  double eps = Eg / 5.0;

  // constant family: no bubble points
  {
    std::vector<MapSample> members;
    for (int n = 0; n < 4; ++n)
      members.push_back(MapSample::from_function(g, [](double, double) { return complexd(1, 2); }));
    REQUIRE(find_bubble_points(SequenceFamily(std::move(members)), eps).empty());
  }

  // concentrating family g(z / 2^-n): bubble point at the origin
  {
    std::vector<MapSample> members;
    for (int n = 0; n <= 4; ++n) members.push_back(ring_concentrated(g, std::pow(2.0, -n)));
    auto pts = find_bubble_points(SequenceFamily(std::move(members)), eps);
    REQUIRE(pts.size() == 1);
    REQUIRE(std::hypot(pts[0][0], pts[0][1]) <= h + 1e-12);
  }

  // strongly convergent family with total energy below eps: no points
  {
    std::vector<MapSample> members;
    for (int n = 1; n <= 5; ++n)
      members.push_back(MapSample::from_function(g, [&](double x, double y) {
        return 0.05 * complexd(x, y) + (0.01 / n) * complexd(y, -x);
      }));
    SequenceFamily fam(std::move(members));
    REQUIRE(energy(fam.member(4)) < eps);
    REQUIRE(find_bubble_points(fam, eps).empty());
  }

  REQUIRE_THROWS_AS(
      find_bubble_points(SequenceFamily({ring_concentrated(g, 0.5), ring_concentrated(g, 0.25)}),
                         eps),
      invalid_input);
}

TEST_CASE("maximal radius") {
  Grid g = Grid::disk(1.0, 257, 257);
  double eps = 0.05;

  // constant maps attain the cap
  MapSample cst = MapSample::from_function(g, [](double, double) { return complexd(3, 1); });
  Region all_center = Region::disk(g, 0, 0, 0.3);
  REQUIRE(maximal_radius(cst, eps, 0.8, all_center) == Approx(0.4));

  // the returned radius scales with the concentration scale (the finest
  // member must stay enough spacings wide to be resolved)
  Grid gf = Grid::disk(1.0, 513, 513);
  Region fine_center = Region::disk(gf, 0, 0, 0.3);
  double eps_s = energy(concentrated(gf, 0.3)) / 3.0;
  std::vector<double> rhat;
  for (double r0 : {0.3, 0.15, 0.075}) {
    MapSample u = concentrated(gf, r0);
    rhat.push_back(maximal_radius(u, eps_s, 0.8, fine_center));
  }
  double q1 = rhat[0] / 0.3, q2 = rhat[1] / 0.15, q3 = rhat[2] / 0.075;
  REQUIRE(q2 == Approx(q1).epsilon(0.10));
  REQUIRE(q3 == Approx(q1).epsilon(0.10));

  // doubling eps grows the radius
  MapSample u = concentrated(g, 0.1);
  double r1 = maximal_radius(u, eps_s, 0.8, all_center);
  double r2 = maximal_radius(u, 2 * eps_s, 0.8, all_center);
  REQUIRE(r2 > r1);

  // saturation at the grid scale is reported
  MapSample spike = concentrated(g, 0.04);
  REQUIRE_THROWS_AS(maximal_radius(spike, 1e-6 * eps_s, 0.8, all_center), numerical_error);
}

TEST_CASE("concentration center") {
  Grid g = Grid::disk(1.0, 129, 129);
  complexd at(0.3, 0.1);
  MapSample u = concentrated(g, 0.1, at);
  double eps = energy(u) / 5.0;
  Region centers = Region::disk(g, 0.3, 0.1, 0.3);
  double r = maximal_radius(u, eps, 0.8, centers);
  REQUIRE(r < 0.4);
  auto c = concentration_center(u, r, eps, centers);
  REQUIRE(std::hypot(c[0] - at.real(), c[1] - at.imag()) <= g.h0() + 1e-12);

  // twin bumps: the smaller row-major node index wins
  MapSample twin = MapSample::from_function(g, [](double x, double y) {
    return profile((complexd(x, y) - complexd(-0.4, 0)) / 0.1) +
           profile((complexd(x, y) - complexd(0.4, 0)) / 0.1);
  });
  DiskEnergyProbe probe(twin);
  Region whole = Region::all(g);
  auto ct = concentration_center(probe, 0.12, probe.disk_energy(-0.4, 0, 0.12) * 0.9, whole);
  REQUIRE(ct[0] == Approx(-0.4).margin(g.h0() + 1e-12));

  // a constant map offers no concentration at all
  MapSample cst = MapSample::from_function(g, [](double, double) { return complexd(1, 1); });
  REQUIRE_THROWS_AS(concentration_center(cst, 0.1, 1.0, whole), invalid_input);
}

TEST_CASE("rescale") {
  Grid g = Grid::disk(1.0, 65, 65);
  MapSample u = MapSample::from_function(g, [](double x, double y) {
    complexd z(x, y);
    return z * z + 0.3 * std::conj(z);
  });

  // identity window reproduces the sample on matching nodes
  MapSample id = rescale(u, complexd(0, 0), 1.0, 1.0);
  for (std::size_t i = 0; i < u.values().size(); ++i)
    REQUIRE(std::abs(id.values()[i] - u.values()[i]) < 1e-10);

  // energy is conserved between corresponding windows
  MapSample v = rescale(u, complexd(0.2, -0.1), 0.15, 2.0);
  double ev = energy(v, Region::disk(v.grid(), 0, 0, 2.0));
  double eu = energy(u, Region::disk(g, 0.2, -0.1, 0.3));
  REQUIRE(ev == Approx(eu).epsilon(0.03));

  // rescaled members of a concentrating family converge to the profile;
  // at resolved scales successive differences stay small and the distance
  // to the limit shrinks under refinement
  auto l2diff = [](const MapSample& a, const MapSample& b) {
    std::vector<complexd> d(a.values().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.values()[i] - b.values()[i];
    return lp_norm_values(MapSample(a.grid(), 1, std::move(d)), 2.0);
  };
  auto dist_to_profile = [&](int res, int n) {
    Grid gg = Grid::disk(1.0, res, res);
    double rn = std::pow(2.0, -n);
    MapSample vn = rescale(concentrated(gg, rn), complexd(0, 0), rn, 1.5);
    MapSample limit = MapSample::from_function(vn.grid(),
                                               [](double x, double y) { return profile(complexd(x, y)); });
    return l2diff(vn, limit);
  };
  {
    Grid gg = Grid::disk(1.0, 257, 257);
    std::vector<MapSample> resc;
    for (int n = 1; n <= 3; ++n) {
      double rn = std::pow(2.0, -n);
      resc.push_back(rescale(concentrated(gg, rn), complexd(0, 0), rn, 1.5));
    }
    REQUIRE(l2diff(resc[0], resc[1]) < 0.02);
    REQUIRE(l2diff(resc[1], resc[2]) < 0.02);
  }
  REQUIRE(dist_to_profile(257, 3) < dist_to_profile(129, 3));

  REQUIRE_THROWS_AS(rescale(u, complexd(0.9, 0), 0.5, 1.0), invalid_input);
}

TEST_CASE("subcase classification") {
  std::vector<double> r(8), R(8), rho(8);
  for (int n = 0; n < 8; ++n) r[n] = std::pow(2.0, -n);

  // R_n / r_n constant: interior bounded case
  for (int n = 0; n < 8; ++n) R[n] = 3 * r[n];
  REQUIRE(classify_subcase(R, r).label == "3'");

  // R_n / r_n = n: increases without bound
  for (int n = 0; n < 8; ++n) R[n] = (n + 1) * r[n];
  REQUIRE(classify_subcase(R, r).label == "3''");

  // geometric growth is unbounded too
  for (int n = 0; n < 8; ++n) R[n] = std::pow(2.0, n) * r[n];
  REQUIRE(classify_subcase(R, r).label == "3''");

  // boundary: rho_n / r_n constant and R_n / r_n bounded
  for (int n = 0; n < 8; ++n) {
    rho[n] = 2 * r[n];
    R[n] = 3 * r[n];
  }
  REQUIRE(classify_subcase(R, r, rho).label == "3'_b");

  // rho/r bounded but R/r unbounded
  for (int n = 0; n < 8; ++n) R[n] = (n + 1) * (n + 1) * r[n];
  REQUIRE(classify_subcase(R, r, rho).label == "3''_b");

  // rho/r = n with R/rho constant
  for (int n = 0; n < 8; ++n) {
    rho[n] = (n + 1) * r[n];
    R[n] = 2 * rho[n];
  }
  REQUIRE(classify_subcase(R, r, rho).label == "3'''_b");

  // both rho/r and R/rho unbounded
  for (int n = 0; n < 8; ++n) {
    rho[n] = (n + 1) * r[n];
    R[n] = (n + 1) * rho[n];
  }
  REQUIRE(classify_subcase(R, r, rho).label == "3''''_b");

  // scale invariance
  std::vector<double> R2 = R, r2 = r, rho2 = rho;
  for (int n = 0; n < 8; ++n) {
    R2[n] *= 7.3;
    r2[n] *= 7.3;
    rho2[n] *= 7.3;
  }
  REQUIRE(classify_subcase(R2, r2, rho2).label == classify_subcase(R, r, rho).label);

  REQUIRE_THROWS_AS(classify_subcase({1, 2}, {1, 2}), invalid_input);
}

TEST_CASE("quantization gate") {
  Grid g = Grid::disk(1.0, 97, 97);
  double eps3 = 0.3;

  MapSample cst = MapSample::from_function(g, [](double, double) { return complexd(4, -1); });
  QuantizationReport qc = quantization_gate(cst, eps3);
  REQUIRE(qc.energy == Approx(0.0).margin(1e-12));
  REQUIRE_FALSE(qc.candidate);
  REQUIRE(qc.oscillation == Approx(0.0).margin(1e-12));

  MapSample big = concentrated(g, 0.5);
  double e = energy(big);
  QuantizationReport qb = quantization_gate(big, e / 5.0);
  REQUIRE(qb.candidate);
  REQUIRE(qb.energy >= 5.0 * (e / 5.0) * 0.99);

  MapSample small = MapSample::from_function(g, [&](double x, double y) {
    return 0.1 * profile(complexd(x, y) / 0.5);
  });
  REQUIRE_FALSE(quantization_gate(small, e / 5.0).candidate);
}

TEST_CASE("family analysis pipeline") {
  Grid g = Grid::disk(1.0, 257, 257);
  double h = g.h0();
  std::vector<MapSample> members;
  std::vector<double> rn;
  for (int n = 0; n <= 4; ++n) {
    rn.push_back(std::pow(2.0, -n));
    members.push_back(ring_concentrated(g, rn.back()));
  }
  SequenceFamily fam(std::move(members));
  // the scale-1 member's support is clipped by the domain; the n = 1 member
  // carries the family's full profile energy
  double eps = energy(fam.member(1)) / 5.0;

  BubbleReport rep = analyze_family(fam, eps, 0.9);
  REQUIRE(rep.points.size() == 1);
  REQUIRE(std::hypot(rep.points[0][0], rep.points[0][1]) <= h + 1e-12);
  REQUIRE(rep.radii.size() == 5);
  // the concentration radius tracks the family scale within a factor two
  for (int n = 1; n <= 4; ++n) {
    REQUIRE(rep.radii[n] >= 0.5 * rn[n]);
    REQUIRE(rep.radii[n] <= 2.0 * rn[n]);
  }
  REQUIRE(rep.subcase == "3'");
  REQUIRE(rep.profile_energy > eps);
}
