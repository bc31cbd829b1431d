#include "freeprob/spd.hpp"

#include <cmath>
#include <stdexcept>

namespace freeprob {

SpdCovariance SpdCovariance::analyze(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols() || c.rows() == 0)
    throw std::invalid_argument("covariance must be square and nonempty");
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("covariance not symmetric");

  SpdCovariance out;
  out.c_ = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.c_);
  out.eigvals_ = es.eigenvalues();
  out.eigvecs_ = es.eigenvectors();
  const double lmax = out.eigvals_.maxCoeff();
  if (out.eigvals_.minCoeff() <= 1e-12 * std::max(1.0, lmax))
    throw std::invalid_argument("covariance not positive definite");

  const auto& v = out.eigvecs_;
  out.inv_ = v * out.eigvals_.cwiseInverse().asDiagonal() * v.transpose();
  out.sqrt_ = v * out.eigvals_.cwiseSqrt().asDiagonal() * v.transpose();
  out.opnorm_ = lmax;
  out.inv_opnorm_ = 1.0 / out.eigvals_.minCoeff();
  return out;
}

Eigen::MatrixXd SpdCovariance::exp_minus_t_inverse(double t) const {
  Eigen::VectorXd d(eigvals_.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::exp(-t / eigvals_[i]);
  return eigvecs_ * d.asDiagonal() * eigvecs_.transpose();
}

Eigen::MatrixXd ou_covariance(const SpdCovariance& c, double t) {
  if (t < 0) throw std::invalid_argument("ou_covariance: time must be nonnegative");
  const auto& lam = c.eigenvalues();
  Eigen::VectorXd d(lam.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = (1.0 - std::exp(-t / lam[i])) * lam[i];
  return c.eigenvectors() * d.asDiagonal() * c.eigenvectors().transpose();
}

}  // namespace freeprob
