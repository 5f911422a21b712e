#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "phk/calculus.hpp"
#include "phk/common.hpp"
#include "phk/detail/banded.hpp"
#include "phk/grid.hpp"
#include "phk/sample.hpp"
#include "phk/totally_real.hpp"

namespace phk {

// gamma_1 = 2/e^2: the sharp three-annuli constant for holomorphic cylinder
// maps among unit segments
inline double three_annuli_gamma() { return 2.0 * std::exp(-2.0); }

// Per-circle Fourier coefficients v_k(t) of a cylinder sample,
// k in [-K, K]. For holomorphic maps v_k(t) is proportional to e^{kt}.
class ModeSpectrum {
 public:
  ModeSpectrum(Grid grid, int target_dim, int kmax, std::vector<double> heights,
               std::vector<complexd> coeffs)
      : grid_(std::move(grid)), n_(target_dim), kmax_(kmax), t_(std::move(heights)),
        coeff_(std::move(coeffs)) {}

  int kmax() const { return kmax_; }
  int target_dim() const { return n_; }
  const std::vector<double>& heights() const { return t_; }
  const Grid& grid() const { return grid_; }

  complexd coeff(int it, int k, int comp = 0) const {
    return coeff_[((std::size_t)it * (2 * kmax_ + 1) + (k + kmax_)) * n_ + comp];
  }

  // sum over modes of |v_k(t_i)|^2; equals the circle mean of |u|^2 for
  // band-limited samples
  double mode_power(int it) const {
    double s = 0;
    for (int k = -kmax_; k <= kmax_; ++k)
      for (int c = 0; c < n_; ++c) s += std::norm(coeff(it, k, c));
    return s;
  }

  // relative residual of the least-squares fit v_k(t) = c e^{kt}
  double holomorphy_residual(int k) const {
    double num = 0, den = 0;
    for (int c = 0; c < n_; ++c) {
      complexd top(0, 0);
      double bot = 0;
      for (std::size_t i = 0; i < t_.size(); ++i) {
        double w = std::exp((double)k * t_[i]);
        top += coeff((int)i, k, c) * w;
        bot += w * w;
      }
      complexd cfit = bot > 0 ? top / bot : complexd(0, 0);
      for (std::size_t i = 0; i < t_.size(); ++i) {
        double w = std::exp((double)k * t_[i]);
        num += std::norm(coeff((int)i, k, c) - cfit * w);
        den += std::norm(coeff((int)i, k, c));
      }
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
  }

 private:
  Grid grid_;
  int n_, kmax_;
  std::vector<double> t_;
  std::vector<complexd> coeff_;
};

// Discrete Fourier transform per circle. The default mode cutoff
// theta-resolution/4 keeps aliasing below the stated tolerances.
inline ModeSpectrum cylinder_modes(const MapSample& u, int kmax = 0) {
  const Grid& g = u.grid();
  require(g.kind() == GridKind::Cylinder, "cylinder_modes expects a cylinder sample");
  if (kmax == 0) kmax = g.n1() / 4;
  require(g.n1() >= 2 * kmax + 2, "theta resolution must be >= 2K+2");
  const int n = u.target_dim();
  std::vector<double> heights(g.n0());
  for (int i0 = 0; i0 < g.n0(); ++i0) heights[i0] = g.coord0(i0);
  std::vector<complexd> coeffs((std::size_t)g.n0() * (2 * kmax + 1) * n);
  for (int i0 = 0; i0 < g.n0(); ++i0)
    for (int k = -kmax; k <= kmax; ++k)
      for (int c = 0; c < n; ++c) {
        complexd s(0, 0);
        for (int i1 = 0; i1 < g.n1(); ++i1) {
          double th = g.coord1(i1);
          s += u.value(g.index(i0, i1), c) * std::polar(1.0, -k * th);
        }
        coeffs[((std::size_t)i0 * (2 * kmax + 1) + (k + kmax)) * n + c] = s / (double)g.n1();
      }
  return ModeSpectrum(g, n, kmax, std::move(heights), std::move(coeffs));
}

// || du ||^2 along the circle at height t: 4 pi sum_k k^2 |v_k(t)|^2.
// Snaps to the nearest sampled circle.
inline double circle_energy_density(const ModeSpectrum& spec, double t) {
  const auto& ts = spec.heights();
  require(!ts.empty() && t >= ts.front() - 1e-12 && t <= ts.back() + 1e-12,
          "t outside the sampled range");
  int best = 0;
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (std::abs(ts[i] - t) < std::abs(ts[best] - t)) best = (int)i;
  double s = 0;
  for (int k = -spec.kmax(); k <= spec.kmax(); ++k)
    for (int c = 0; c < spec.target_dim(); ++c)
      s += (double)k * k * std::norm(spec.coeff(best, k, c));
  return 4 * pi * s;
}

// 2 E3 / (E2 + E4): compare against gamma to test the three-segment estimate
inline double three_segment_ratio(double e2, double e3, double e4) {
  require(e2 >= 0 && e3 >= 0 && e4 >= 0, "energies must be nonnegative");
  require(e2 + e4 > 0, "outer segments carry no energy");
  return 2 * e3 / (e2 + e4);
}

// The root lambda > 1 of lambda = (gamma/2)(lambda^2 + 1)
inline double lambda_from_gamma(double gamma) {
  require(gamma > 0 && gamma <= 1, "gamma must lie in (0,1]");
  return (1.0 + std::sqrt((1.0 - gamma) * (1.0 + gamma))) / gamma;
}

// lambda^{-(k-2)} E2 + lambda^{-(l-1-k)} E_{l-1}: the two-sided geometric
// envelope of segment energies
inline double decay_envelope(double e2, double e_last, double lambda, int k, int l) {
  require(lambda > 1, "envelope requires lambda > 1");
  require(2 <= k && k <= l - 1, "segment index out of range");
  return std::pow(lambda, -(double)(k - 2)) * e2 + std::pow(lambda, -(double)(l - 1 - k)) * e_last;
}

enum class Removability { Removable, NonRemovable };

struct DecayReport {
  std::vector<double> segment_energies;  // E_i over Z_i, i = 1..l
  double fitted_rate = 0.0;              // slope of log E_i over the tail
  bool tail_ok = false;
  int tail_start = -1;                   // first i with E_j <= eps for all j >= i
  std::vector<int> envelope_violations;  // k with E_k above the envelope
  Removability verdict = Removability::NonRemovable;
  double epsilon = 0.0;
  double lambda_min = 0.0;
};

struct DecayConfig {
  // the classical thresholds are existential, not numeric; both stay
  // configurable. lambda_min defaults to the root for gamma_1 = 2/e^2.
  double lambda_min = 0.0;  // 0 -> lambda_from_gamma(2/e^2)
  double rate_slack = 0.02;
  double envelope_slack = 0.02;
};

// Segment energies of u on Z(0,l), the epsilon tail condition and the decay
// fit. Removable iff the tail condition holds and the fitted rate is at
// least the geometric rate of lambda_min (all-zero tails short-circuit).
inline DecayReport removability_diagnostic(const MapSample& u, double eps,
                                           const DecayConfig& cfg = DecayConfig{}) {
  const Grid& g = u.grid();
  require(g.kind() == GridKind::Cylinder, "removability diagnostic expects a cylinder");
  require(eps > 0, "epsilon must be positive");
  double len = g.param1() - g.param0();
  int l = (int)std::lround(len);
  require(std::abs(len - l) < 1e-9 && l >= 5, "cylinder must span >= 5 unit segments");
  require((g.n0() - 1) % l == 0, "resolution must align unit segments with nodes");

  DecayReport rep;
  rep.epsilon = eps;
  rep.lambda_min = cfg.lambda_min > 0 ? cfg.lambda_min : lambda_from_gamma(three_annuli_gamma());
  rep.segment_energies = segment_energies(u);

  int tail = -1;
  for (int i = l; i >= 1; --i) {
    if (rep.segment_energies[i - 1] <= eps)
      tail = i;
    else
      break;
  }
  rep.tail_start = tail;
  rep.tail_ok = tail > 0 && tail <= l - 2;

  // least squares on log energies over the tail, zero segments excluded
  bool all_zero = true;
  if (rep.tail_ok) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = tail; i <= l; ++i) {
      double e = rep.segment_energies[i - 1];
      if (e <= 1e-300) continue;
      all_zero = false;
      double x = i, y = std::log(e);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    if (m >= 2) {
      rep.fitted_rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    } else {
      rep.fitted_rate = 0.0;
    }
    if (all_zero)
      rep.verdict = Removability::Removable;
    else
      rep.verdict = (rep.fitted_rate <= -(1.0 - cfg.rate_slack) * std::log(rep.lambda_min))
                        ? Removability::Removable
                        : Removability::NonRemovable;
  }

  // envelope check of Eq-style two-sided decay over interior segments
  if (l >= 4) {
    double e2 = rep.segment_energies[1], elast = rep.segment_energies[l - 2];
    for (int k = 2; k <= l - 1; ++k) {
      double bound = decay_envelope(e2, elast, rep.lambda_min, k, l);
      if (rep.segment_energies[k - 1] > bound * (1.0 + cfg.envelope_slack))
        rep.envelope_violations.push_back(k);
    }
  }
  return rep;
}

struct StripEigenResult {
  std::vector<double> eigenvalues;  // leading eigenvalues, zeros included
  int zero_dimension = 0;           // dim(W0 cap W1), arbitrated by SVD
  double lambda1 = 0.0;             // smallest positive eigenvalue
  double gamma_w = 0.0;
};

// gamma_W = 2 / (1 + cosh(2 sqrt(lambda1)))
inline double gamma_w(double lambda1) {
  require(lambda1 >= 0, "lambda1 must be nonnegative");
  return 2.0 / (1.0 + std::cosh(2.0 * std::sqrt(lambda1)));
}

// Eigenvalues of Q(v) = int_0^1 |d_theta v|^2 on maps [0,1] -> C^n with
// v(0) in W0, v(1) in W1 (the natural boundary conditions
// d_theta v(0) perp W0, d_theta v(1) perp W1 come from the quadratic form).
// P1 Galerkin finite differences with lumped mass, banded LDLT shift-invert
// Lanczos deflated by the explicit zero space of constants in W0 cap W1.
// Eigenvalues converge at O(1/N^2).
inline StripEigenResult strip_eigs(const TotallyRealSubspace& w0, const TotallyRealSubspace& w1,
                                   int N, int wanted = 8) {
  require(w0.dimension() == w1.dimension(), "subspace dimensions must agree");
  require(N >= 50, "discretization count must be >= 50");
  const int n = w0.dimension();
  const int d2 = 2 * n;
  const double h = 1.0 / N;
  const int dim = 2 * n * N;  // a (n) + interior (2n each) + b (n)

  const Eigen::MatrixXd& B0 = w0.orthonormal_basis();
  const Eigen::MatrixXd& B1 = w1.orthonormal_basis();

  auto row_of_a = [&](int p) { return p; };
  auto row_of_v = [&](int j, int p) { return n + (j - 1) * d2 + p; };  // j = 1..N-1
  auto row_of_b = [&](int p) { return n + (N - 1) * d2 + p; };

  detail::SymBanded K(dim, 4 * n - 1);
  std::vector<double> mass(dim, 0.0);

  // element (v_0, v_1) with v_0 = B0 a
  for (int p = 0; p < n; ++p) K.at(row_of_a(p), row_of_a(p)) += 1.0 / h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < d2; ++q) K.at(row_of_a(p), row_of_v(1, q)) += -B0(q, p) / h;
  for (int q = 0; q < d2; ++q) K.at(row_of_v(1, q), row_of_v(1, q)) += 1.0 / h;
  // interior elements (v_j, v_{j+1})
  for (int j = 1; j + 1 <= N - 1; ++j)
    for (int q = 0; q < d2; ++q) {
      K.at(row_of_v(j, q), row_of_v(j, q)) += 1.0 / h;
      K.at(row_of_v(j + 1, q), row_of_v(j + 1, q)) += 1.0 / h;
      K.at(row_of_v(j, q), row_of_v(j + 1, q)) += -1.0 / h;
    }
  // element (v_{N-1}, v_N) with v_N = B1 b
  for (int q = 0; q < d2; ++q) K.at(row_of_v(N - 1, q), row_of_v(N - 1, q)) += 1.0 / h;
  for (int p = 0; p < n; ++p) K.at(row_of_b(p), row_of_b(p)) += 1.0 / h;
  for (int q = 0; q < d2; ++q)
    for (int p = 0; p < n; ++p) K.at(row_of_v(N - 1, q), row_of_b(p)) += -B1(q, p) / h;

  for (int p = 0; p < n; ++p) mass[row_of_a(p)] = h / 2;
  for (int j = 1; j <= N - 1; ++j)
    for (int q = 0; q < d2; ++q) mass[row_of_v(j, q)] = h;
  for (int p = 0; p < n; ++p) mass[row_of_b(p)] = h / 2;

  // shift-invert operator S = M^{1/2} (K + sigma M)^{-1} M^{1/2}
  const double sigma = 1.0;
  detail::SymBanded Ks = K;
  for (int i = 0; i < dim; ++i) Ks.at(i, i) += sigma * mass[i];
  detail::BandedLDLT solver(Ks);
  std::vector<double> msqrt(dim);
  for (int i = 0; i < dim; ++i) msqrt[i] = std::sqrt(mass[i]);
  auto apply_S = [&](const std::vector<double>& x) {
    std::vector<double> y(dim);
    for (int i = 0; i < dim; ++i) y[i] = msqrt[i] * x[i];
    solver.solve(y);
    for (int i = 0; i < dim; ++i) y[i] *= msqrt[i];
    return y;
  };

  // explicit zero modes: constants with value in W0 cap W1
  Eigen::MatrixXd inter = w0.intersection_basis(w1);
  const int zdim = (int)inter.cols();
  std::vector<std::vector<double>> deflate;
  for (int c = 0; c < zdim; ++c) {
    std::vector<double> x(dim, 0.0);
    Eigen::VectorXd w = inter.col(c);
    Eigen::VectorXd a = B0.transpose() * w;
    Eigen::VectorXd b = B1.transpose() * w;
    for (int p = 0; p < n; ++p) x[row_of_a(p)] = a(p);
    for (int j = 1; j <= N - 1; ++j)
      for (int q = 0; q < d2; ++q) x[row_of_v(j, q)] = w(q);
    for (int p = 0; p < n; ++p) x[row_of_b(p)] = b(p);
    for (int i = 0; i < dim; ++i) x[i] *= msqrt[i];  // S-coordinates
    // orthonormalize against previous
    for (const auto& prev : deflate) {
      double dp = 0;
      for (int i = 0; i < dim; ++i) dp += prev[i] * x[i];
      for (int i = 0; i < dim; ++i) x[i] -= dp * prev[i];
    }
    double nrm = 0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : x) v /= nrm;
    deflate.push_back(std::move(x));
  }

  // Lanczos with full reorthogonalization on the deflated complement
  const int steps = std::min(dim - zdim, 110);
  std::vector<std::vector<double>> V;
  std::vector<double> alpha, beta;
  SplitMix64 rng(0x5eed5eedULL);
  std::vector<double> v(dim);
  for (double& x : v) x = rng.uniform(-1, 1);
  auto project_out = [&](std::vector<double>& x) {
    for (const auto& p : deflate) {
      double dp = 0;
      for (int i = 0; i < dim; ++i) dp += p[i] * x[i];
      for (int i = 0; i < dim; ++i) x[i] -= dp * p[i];
    }
    for (const auto& p : V) {
      double dp = 0;
      for (int i = 0; i < dim; ++i) dp += p[i] * x[i];
      for (int i = 0; i < dim; ++i) x[i] -= dp * p[i];
    }
  };
  project_out(v);
  {
    double nrm = 0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : v) x /= nrm;
  }
  V.push_back(v);
  for (int it = 0; it < steps; ++it) {
    std::vector<double> w = apply_S(V.back());
    double a = 0;
    for (int i = 0; i < dim; ++i) a += w[i] * V.back()[i];
    alpha.push_back(a);
    project_out(w);
    project_out(w);  // second pass keeps orthogonality tight
    double b = 0;
    for (double x : w) b += x * x;
    b = std::sqrt(b);
    if (b < 1e-300) break;
    beta.push_back(b);
    for (double& x : w) x /= b;
    V.push_back(std::move(w));
  }
  if (!beta.empty() && beta.size() == alpha.size()) beta.pop_back();

  const int m = (int)alpha.size();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < m) {
      T(i, i + 1) = beta[i];
      T(i + 1, i) = beta[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  std::vector<double> lambdas;
  for (int i = 0; i < m; ++i) {
    double mu = es.eigenvalues()(i);
    if (mu > 1e-12) lambdas.push_back(1.0 / mu - sigma);
  }
  std::sort(lambdas.begin(), lambdas.end());

  StripEigenResult res;
  res.zero_dimension = zdim;
  for (int i = 0; i < zdim; ++i) res.eigenvalues.push_back(0.0);
  for (std::size_t i = 0; i < lambdas.size() && (int)res.eigenvalues.size() < wanted; ++i)
    res.eigenvalues.push_back(lambdas[i]);
  require(!lambdas.empty(), "no positive eigenvalue found");
  res.lambda1 = lambdas.front();
  require(res.lambda1 > -1e-8, "eigenvalues must be nonnegative");
  res.gamma_w = gamma_w(res.lambda1);
  return res;
}

struct ThreeStripsResult {
  double ratio;
  double bound;
  bool holds;
};

// Exact closed-form evaluation of the slab integrals
// I(s) = int_s^{s+1} (a e^{alpha t} + b e^{-alpha t})^2 dt and the sharp
// comparison ratio 2 I(1) / (I(0) + I(2)) against 2/(1 + cosh 2 alpha).
inline ThreeStripsResult three_strips_check(double a, double b, double alpha) {
  require(alpha > 0, "alpha must be positive");
  require(a != 0 || b != 0, "trivial coefficient pair");
  auto I = [&](double s) {
    double p = (std::exp(2 * alpha) - 1.0) / (2 * alpha);
    double q = (1.0 - std::exp(-2 * alpha)) / (2 * alpha);
    return a * a * std::exp(2 * alpha * s) * p + 2 * a * b +
           b * b * std::exp(-2 * alpha * s) * q;
  };
  ThreeStripsResult r;
  r.ratio = 2 * I(1) / (I(0) + I(2));
  r.bound = 2.0 / (1.0 + std::cosh(2 * alpha));
  r.holds = r.ratio <= r.bound * (1 + 1e-14);
  return r;
}

// p* = 2/(1 - alpha): the corner map z^alpha is L^{1,p}-regular for p < p*
inline double corner_sobolev_exponent(double alpha) {
  require(alpha > 0 && alpha < 1, "alpha must lie in (0,1)");
  return 2.0 / (1.0 - alpha);
}

// p < 4 pi / (2 pi - log lambda_b): the integrability exponent granted by a
// boundary decay rate lambda_b
inline double boundary_decay_exponent(double lambda_b) {
  require(lambda_b > 1 && std::log(lambda_b) < 2 * pi, "lambda_b must lie in (1, e^{2 pi})");
  return 4 * pi / (2 * pi - std::log(lambda_b));
}

struct GateReport {
  std::vector<double> segment_energies;
  int violating_segment = -1;  // 1-based; -1 when every segment passes
  double oscillation = 0.0;    // bounding-box diameter of the values
};

// Lower-bound gate for nonconstant strip maps: if every unit segment of
// Theta(0,l) carries energy <= eps the map must be near constant; otherwise
// the first violating segment witnesses nonconstancy. Boundary rows must lie
// on affine translates of W0 / W1 (the orthogonal component of each row must
// be constant): the classical counterexamples map into parallel affine
// planes, which are admissible boundary data for the gate.
inline GateReport nonconstancy_energy_gate(const MapSample& u, const TotallyRealSubspace& w0,
                                           const TotallyRealSubspace& w1, double eps,
                                           double boundary_tol = 1e-6) {
  const Grid& g = u.grid();
  require(g.kind() == GridKind::Strip, "gate expects a strip sample");
  require(eps > 0, "epsilon must be positive");
  const int n = u.target_dim();
  require(w0.dimension() == n && w1.dimension() == n, "subspace dimension mismatch");
  double len = g.param1() - g.param0();
  int l = (int)std::lround(len);
  require(std::abs(len - l) < 1e-9 && l >= 1, "strip must span whole unit segments");
  require((g.n0() - 1) % l == 0, "resolution must align unit segments with nodes");

  double scale = 0;
  for (const auto& v : u.values()) scale = std::max(scale, std::abs(v));
  auto check_row = [&](int i1, const TotallyRealSubspace& w, const char* name) {
    const Eigen::MatrixXd& q = w.orthonormal_basis();
    Eigen::MatrixXd perp =
        Eigen::MatrixXd::Identity(2 * n, 2 * n) - q * q.transpose();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2 * n);
    std::vector<Eigen::VectorXd> resid;
    for (int i0 = 0; i0 < g.n0(); ++i0) {
      Eigen::VectorXd x(2 * n);
      const complexd* vv = u.at(g.index(i0, i1));
      for (int c = 0; c < n; ++c) {
        x(2 * c) = vv[c].real();
        x(2 * c + 1) = vv[c].imag();
      }
      resid.push_back(perp * x);
      mean += resid.back();
    }
    mean /= (double)g.n0();
    double worst = 0;
    for (const auto& r : resid) worst = std::max(worst, (r - mean).norm());
    if (worst > boundary_tol * std::max(scale, 1e-300))
      throw invalid_input(std::string("boundary row ") + name +
                          " leaves its subspace (max deviation " + std::to_string(worst) + ")");
  };
  check_row(0, w0, "theta=0");
  check_row(g.n1() - 1, w1, "theta=1");

  GateReport rep;
  rep.segment_energies = segment_energies(u);
  for (int i = 1; i <= l; ++i)
    if (rep.segment_energies[i - 1] > eps) {
      rep.violating_segment = i;
      break;
    }

  // oscillation: diameter of the axis-aligned bounding box of the values
  std::vector<double> lo(2 * n, 1e300), hi(2 * n, -1e300);
  for (int node = 0; node < g.node_count(); ++node)
    for (int c = 0; c < n; ++c) {
      const complexd v = u.value(node, c);
      lo[2 * c] = std::min(lo[2 * c], v.real());
      hi[2 * c] = std::max(hi[2 * c], v.real());
      lo[2 * c + 1] = std::min(lo[2 * c + 1], v.imag());
      hi[2 * c + 1] = std::max(hi[2 * c + 1], v.imag());
    }
  double diag = 0;
  for (int i = 0; i < 2 * n; ++i) diag += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  rep.oscillation = std::sqrt(diag);
  return rep;
}

}  // namespace phk
