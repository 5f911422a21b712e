#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "phk/common.hpp"

namespace phk {

// An n-dimensional real subspace W of C^n with W and J_st W transversal.
// The real identification interleaves (Re u_0, Im u_0, ...), matching
// StructureField. Construction orthonormalizes the basis, certifies total
// reality by the smallest singular value of [Q | J_st Q], and derives the
// lower angle: the least angle between J_st xi and W over unit xi in W.
class TotallyRealSubspace {
 public:
  static constexpr double total_real_tol = 1e-8;

  TotallyRealSubspace(int n, Eigen::MatrixXd basis) : n_(n) {
    require(n_ >= 1, "dimension must be >= 1");
    require(basis.rows() == 2 * n_ && basis.cols() == n_, "basis must be 2n x n");
    // orthonormalize; rank defect shows up as a tiny R diagonal
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd R = qr.matrixQR().topRows(n_).triangularView<Eigen::Upper>();
    for (int i = 0; i < n_; ++i)
      require(std::abs(R(i, i)) > 1e-12 * basis.norm(), "basis must have rank n");
    q_ = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n_, n_);

    Eigen::MatrixXd stacked(2 * n_, 2 * n_);
    stacked.leftCols(n_) = q_;
    stacked.rightCols(n_) = apply_jst(q_);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    double sigma_min = svd.singularValues().minCoeff();
    if (sigma_min <= total_real_tol)
      throw invalid_input("subspace is not totally real: W meets J_st W");

    // principal angles between J_st W and W
    Eigen::JacobiSVD<Eigen::MatrixXd> ang(q_.transpose() * apply_jst(q_));
    double cmax = ang.singularValues().size() ? ang.singularValues().maxCoeff() : 0.0;
    cmax = std::min(1.0, std::max(0.0, cmax));
    lower_angle_ = std::acos(cmax);
    require(lower_angle_ > 0, "lower angle must be positive");
  }

  // R^n inside C^n
  static TotallyRealSubspace real_subspace(int n) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, n);
    for (int k = 0; k < n; ++k) b(2 * k, k) = 1.0;
    return TotallyRealSubspace(n, b);
  }

  // e^{i beta} R inside C (n = 1)
  static TotallyRealSubspace line(double beta) {
    Eigen::MatrixXd b(2, 1);
    b(0, 0) = std::cos(beta);
    b(1, 0) = std::sin(beta);
    return TotallyRealSubspace(1, b);
  }

  int dimension() const { return n_; }
  const Eigen::MatrixXd& orthonormal_basis() const { return q_; }
  double lower_angle() const { return lower_angle_; }

  // distance of a complex vector to W
  double distance(const complexd* v) const {
    Eigen::VectorXd x(2 * n_);
    for (int k = 0; k < n_; ++k) {
      x(2 * k) = v[k].real();
      x(2 * k + 1) = v[k].imag();
    }
    Eigen::VectorXd res = x - q_ * (q_.transpose() * x);
    return res.norm();
  }

  // J_st applied columnwise to stacked real vectors
  static Eigen::MatrixXd apply_jst(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int k = 0; k + 1 < (int)m.rows(); k += 2) {
      out.row(k) = -m.row(k + 1);
      out.row(k + 1) = m.row(k);
    }
    return out;
  }

  // real dimension of the intersection with another subspace, decided by
  // principal angles: cosines above 1 - tol count as shared directions
  int intersection_dimension(const TotallyRealSubspace& other, double tol = 1e-10) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q_.transpose() * other.q_);
    int d = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) >= 1.0 - tol) ++d;
    return d;
  }

  // orthonormal basis (in R^{2n}) of the intersection with another subspace
  Eigen::MatrixXd intersection_basis(const TotallyRealSubspace& other, double tol = 1e-10) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q_.transpose() * other.q_,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    int d = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) >= 1.0 - tol) ++d;
    Eigen::MatrixXd out(2 * n_, d);
    for (int i = 0; i < d; ++i) out.col(i) = q_ * svd.matrixU().col(i);
    return out;
  }

 private:
  int n_;
  Eigen::MatrixXd q_;
  double lower_angle_;
};

}  // namespace phk
