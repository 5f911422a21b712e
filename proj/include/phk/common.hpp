#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phk {

using complexd = std::complex<double>;

// Thrown when inputs violate a documented precondition.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when an iteration fails to converge or a quantity saturates.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw invalid_input(msg);
}

constexpr double pi = 3.14159265358979323846;

// SplitMix64: tiny deterministic generator. std::uniform_real_distribution is
// implementation-defined, so seeded results would not be reproducible across
// standard libraries; this is.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [a,b)
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

 private:
  std::uint64_t state_;
};

// Fixed-order pairwise summation. Deterministic for a given input order and
// more accurate than a running sum on long arrays.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

}  // namespace phk
