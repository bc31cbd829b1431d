#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "freeprob/kernel.hpp"
#include "freeprob/spd.hpp"
#include "freeprob/wigner.hpp"

namespace freeprob {

// One term of the chaos expansion of the Malliavin-Stein matrix entry
// integral (id x tau)(grad I_p(f)) . (grad I_q(g))* dt: the time-integrated
// kernel (f_t^p contracted l times with the tilde slice g~_t^m), split over
// the two tensor legs as (p+m-2-2l, q-m).
struct GammaTerm {
  int m;
  int l;
  int left_order;
  int right_order;
  double norm_sq;
};

struct GammaExpansion {
  double total;             // squared distance to a * 1(x)1
  bool has_constant;        // true iff p == q
  std::complex<double> constant;  // the scalar chaos coefficient when p == q
  double a;
  std::vector<GammaTerm> terms;  // non-constant terms
};

// Exact squared L^2 distance between the Gamma-matrix entry for the pair
// (I_p(f), I_q(g)) and a * 1(x)1, expanded term by term through the Wigner
// bi-isometry. Requires mirror-symmetric kernels.
GammaExpansion gamma_discrepancy_expansion(const Kernel& f, const Kernel& g, double a);
double gamma_discrepancy_sq(const Kernel& f, const Kernel& g, double a);

// The contraction-norm upper bound dominating gamma_discrepancy_sq, per case
// split on the chaos orders.
double lemma8_rhs(const Kernel& f, const Kernel& g, double a);

// psi(x_1,y_1,...,x_n,y_n): sum over component pairs of
// base(q_j,q_k)^{3/4} * min(|x_k|^{1/4} y_j^{1/2}, |x_j|^{1/4} y_k^{1/2}),
// base = q_k when orders agree and max(q_j,q_k) otherwise.
double psi(std::span<const double> xs, std::span<const double> ys, std::span<const int> orders);

// M(F) = psi evaluated at x_i = tau(F_i^4) - 2 tau(F_i^2)^2, y_i = tau(F_i^2).
double m_of_f(const WignerVector& f);

struct DwBounds {
  double stein_upper;  // ||C^{-1}||_op * sqrt(sum_ij gamma_discrepancy_sq(f_i, f_j, C_ij))
  double thm8;         // ||C||^{1/2} ||C^{-1}|| * M(F)
  double lemma;        // ||C|| ||C^{-1}||^{1/2} * stein_upper
};

// Both Wasserstein constants are reported side by side; the covariance must be
// the analyzed Gram matrix of F.
DwBounds dw_bounds(const WignerVector& f, const SpdCovariance& c);

// e^{-2t/||C||} / sqrt(1 - e^{-2t/||C||}) * ||C^{-1}||^{1/2} * sigma;
// the Fisher-information decay along the interpolation. Requires t > 0.
double fisher_decay_bound(double t, double sigma, const SpdCovariance& c);

// (||C|| ||C^{-1}|| / 2) sigma^2 log(1 + phi / (||C^{-1}|| sigma^2)), with the
// sigma -> 0 limit defined as 0. Never exceeds lsi_rhs.
double hsi_rhs(double sigma, double phi, const SpdCovariance& c);
// ||C|| * phi / 2
double lsi_rhs(double phi, const SpdCovariance& c);

// q-Fock second-quantization discrepancy bound |q| n / sqrt(1 - q^2 n) and the
// squared Hilbert-Schmidt norm q^2 n / (1 - q^2 n) = sum_{N>=1} (q^2 n)^N.
// Requires q^2 n < 1.
double xi_q_discrepancy(double q, int n);
double xi_q_hs_norm_sq(double q, int n);

// (n/2) log(2 pi e / rho)
double semicircular_entropy(int n, double rho);

struct BoundReport {
  std::vector<int> orders;
  std::vector<double> x;  // fourth cumulants
  std::vector<double> y;  // variances
  Eigen::MatrixXd gram;
  Eigen::MatrixXd gamma_discrepancy_sq;  // per-pair squared discrepancies
  std::vector<std::vector<GammaExpansion>> gamma_terms;
  double stein_upper = 0;
  double m_of_f = 0;
  double dw_thm8 = 0;
  double dw_lemma = 0;
  // HSI/LSI right-hand sides evaluated at sigma = stein_upper and
  // phi = tr(C^{-1}), the Fisher information of the target family.
  double hsi_rhs = 0;
  double lsi_rhs = 0;
};

BoundReport bound_report(const WignerVector& f);

}  // namespace freeprob
