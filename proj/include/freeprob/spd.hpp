#pragma once

#include <Eigen/Dense>

namespace freeprob {

// Symmetric positive-definite covariance with eigendecomposition-backed
// derived objects: inverse, square root, operator norms, matrix functions.
class SpdCovariance {
 public:
  // Requires a square matrix, symmetric to 1e-10 (relative) and with all
  // eigenvalues above 1e-12 * ||C||. Throws std::invalid_argument otherwise.
  static SpdCovariance analyze(const Eigen::MatrixXd& c);

  int dim() const { return static_cast<int>(c_.rows()); }
  const Eigen::MatrixXd& matrix() const { return c_; }
  const Eigen::MatrixXd& inverse() const { return inv_; }
  const Eigen::MatrixXd& sqrt() const { return sqrt_; }
  double opnorm() const { return opnorm_; }
  double inverse_opnorm() const { return inv_opnorm_; }
  double condition_number() const { return opnorm_ * inv_opnorm_; }
  const Eigen::VectorXd& eigenvalues() const { return eigvals_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigvecs_; }

  // e^{-t C^{-1}} by functional calculus
  Eigen::MatrixXd exp_minus_t_inverse(double t) const;

 private:
  Eigen::MatrixXd c_, inv_, sqrt_, eigvecs_;
  Eigen::VectorXd eigvals_;
  double opnorm_ = 0.0, inv_opnorm_ = 0.0;
};

// Covariance of the stationary Ornstein-Uhlenbeck interpolation at time t:
// (I - e^{-t C^{-1}}) C. Symmetric PSD, increasing to C. Requires t >= 0.
Eigen::MatrixXd ou_covariance(const SpdCovariance& c, double t);

}  // namespace freeprob
