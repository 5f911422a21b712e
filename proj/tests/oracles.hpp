// Test-side oracles, independent of the library paths they check.
#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "phk/grid.hpp"
#include "phk/sample.hpp"

namespace oracles {

using phk::complexd;
using phk::Grid;
using phk::MapSample;

// fast synthesis of sum_k c_k e^{k(t + i theta)} on a cylinder grid through
// per-circle tables
inline MapSample mode_map(const Grid& g, const std::vector<std::pair<int, complexd>>& modes) {
  const int n0 = g.n0(), n1 = g.n1();
  std::vector<complexd> phase((std::size_t)modes.size() * n1);
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (int i1 = 0; i1 < n1; ++i1)
      phase[m * n1 + i1] = std::polar(1.0, modes[m].first * g.coord1(i1));
  std::vector<complexd> vals((std::size_t)g.node_count());
  std::vector<complexd> amp(modes.size());
  for (int i0 = 0; i0 < n0; ++i0) {
    double t = g.coord0(i0);
    for (std::size_t m = 0; m < modes.size(); ++m)
      amp[m] = modes[m].second * std::exp(modes[m].first * t);
    for (int i1 = 0; i1 < n1; ++i1) {
      complexd s(0, 0);
      for (std::size_t m = 0; m < modes.size(); ++m) s += amp[m] * phase[m * n1 + i1];
      vals[g.index(i0, i1)] = s;
    }
  }
  return MapSample(g, 1, std::move(vals));
}

// Shooting oracle for the n = 1 strip eigenproblem with W0 = e^{i b0} R and
// W1 = e^{i b1} R: propagate v(th) = v(0) cos(om th) + v'(0) sin(om th)/om
// from the admissible initial space and locate the smallest om > 0 where the
// terminal conditions v(1) in W1, v'(1) perp W1 admit a nonzero solution.
// Zeros of the 2x2 determinant can be tangential, so the scan refines local
// minima of |D| instead of bisecting sign changes.
inline double shooting_lambda1(double b0, double b1) {
  double dd = b1 - b0;
  auto D = [&](double om) {
    double c = std::cos(om), s = std::sin(om);
    double sd = std::sin(dd), cd = std::cos(dd);
    return -c * c * sd * sd + s * s * cd * cd;
  };
  const double step = 1e-3;
  for (double om = 2 * step; om < 4.0; om += step) {
    if (std::abs(D(om)) > std::abs(D(om + step)) || std::abs(D(om)) > std::abs(D(om - step)))
      continue;
    double lo = std::max(1e-6, om - step), hi = om + step;
    for (int it = 0; it < 200; ++it) {
      double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (std::abs(D(m1)) < std::abs(D(m2)))
        hi = m2;
      else
        lo = m1;
    }
    double om_star = 0.5 * (lo + hi);
    if (std::abs(D(om_star)) < 1e-10 && om_star > 1e-4) return om_star * om_star;
  }
  return -1;
}

// concentration profile with gradient mass at mid-radius, supported in
// |z| <= 1.5: the radius holding a fifth of its energy sits near 0.7
inline complexd ring_profile(complexd z) {
  double u = std::norm(z) / (1.5 * 1.5);
  if (u >= 1.0) return complexd(0, 0);
  double w = u * u * (1 - u) * (1 - u) * (1 - u);
  return 9.0 * z * w;
}

}  // namespace oracles
