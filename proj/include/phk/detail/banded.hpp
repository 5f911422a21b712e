#pragma once

#include <cmath>
#include <vector>

#include "phk/common.hpp"

namespace phk::detail {

// Symmetric banded matrix stored by diagonals: entry (i, i+k) for
// 0 <= k <= bandwidth lives at diag[k][i].
class SymBanded {
 public:
  SymBanded(int dim, int bandwidth)
      : dim_(dim), bw_(bandwidth), diag_(bandwidth + 1, std::vector<double>(dim, 0.0)) {}

  int dim() const { return dim_; }
  int bandwidth() const { return bw_; }

  double& at(int i, int j) {
    if (j < i) std::swap(i, j);
    return diag_[j - i][i];
  }
  double get(int i, int j) const {
    if (j < i) std::swap(i, j);
    int k = j - i;
    if (k > bw_) return 0.0;
    return diag_[k][i];
  }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    for (int i = 0; i < dim_; ++i) {
      double s = diag_[0][i] * x[i];
      for (int k = 1; k <= bw_ && i + k < dim_; ++k) s += diag_[k][i] * x[i + k];
      for (int k = 1; k <= bw_ && i - k >= 0; ++k) s += diag_[k][i - k] * x[i - k];
      y[i] = s;
    }
  }

 private:
  int dim_, bw_;
  std::vector<std::vector<double>> diag_;
};

// LDL^T factorization of a symmetric positive definite banded matrix;
// solve() overwrites the right-hand side with the solution.
class BandedLDLT {
 public:
  explicit BandedLDLT(const SymBanded& a) : dim_(a.dim()), bw_(a.bandwidth()) {
    // dense-in-band lower factor: l_[i][k] = L(i, i-k), k = 1..bw
    l_.assign(dim_, std::vector<double>(bw_ + 1, 0.0));
    d_.assign(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      double di = a.get(i, i);
      for (int k = 1; k <= bw_ && i - k >= 0; ++k) di -= l_[i][k] * l_[i][k] * d_[i - k];
      require(di > 0, "banded LDLT requires positive definiteness");
      d_[i] = di;
      for (int j = i + 1; j <= i + bw_ && j < dim_; ++j) {
        double s = a.get(j, i);
        for (int k = 1; k <= bw_; ++k) {
          int col = i - k;
          if (col < 0) break;
          int kj = j - col;
          if (kj <= bw_) s -= l_[j][kj] * l_[i][k] * d_[col];
        }
        l_[j][j - i] = s / d_[i];
      }
    }
  }

  void solve(std::vector<double>& b) const {
    for (int i = 0; i < dim_; ++i)
      for (int k = 1; k <= bw_ && i - k >= 0; ++k) b[i] -= l_[i][k] * b[i - k];
    for (int i = 0; i < dim_; ++i) b[i] /= d_[i];
    for (int i = dim_ - 1; i >= 0; --i)
      for (int k = 1; k <= bw_ && i + k < dim_; ++k) b[i] -= l_[i + k][k] * b[i + k];
  }

 private:
  int dim_, bw_;
  std::vector<std::vector<double>> l_;
  std::vector<double> d_;
};

}  // namespace phk::detail
