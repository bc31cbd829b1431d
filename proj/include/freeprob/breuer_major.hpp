#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace freeprob {

// Covariance of the unit increments of the fractional process:
// rho_H(r) = ((|r+1|^{2H} + |r-1|^{2H} - 2|r|^{2H}) / 2. Even in r, rho_H(0)=1.
double rho_h(long long r, double hurst);

// Coefficients of the degree-q Chebyshev polynomial of the second kind,
// ascending powers; U_0 = 1, U_1 = x, U_{n+1} = x U_n - U_{n-1}. q <= 12.
std::vector<double> chebyshev_u(int q);

// sum over r in Z of rho_H(r)^q, summed until the power-law tail estimate
// drops below tail_tol; a tail extrapolation kicks in when the partial sums
// converge too slowly to finish by brute force. Requires H < 1 - 1/(2q).
double sigma_sq(int q, double hurst, double tail_tol);

struct BmConfig {
  double hurst;
  int rank;                   // Chebyshev rank q >= 2
  long long n;                // samples per unit time
  std::vector<double> times;  // 0 = t_0 < t_1 < ... < t_d
  double tail_tol = 1e-10;
};

// Exact squared contraction norm ||f (r-contract) f||^2 of the normalized
// block kernel f = c * sum_{k in block} e_k^{(x) q} in the increment Gram
// basis <e_k, e_l> = rho_H(k-l); c^2 = 1 / (sigma^2 n dt). Evaluated as
// c^4 Tr((W P)^2) with W = rho^r, P = rho^{q-r} over the block.
double bm_contraction_norm_sq(long long n, int rank, double hurst, int r, long long block_lo,
                              long long block_hi, double sigma_sq_value, double dt);

// Truncated-range stationary approximation for blocks beyond the exact cap:
// the Toeplitz product row is convolved over a window of the given radius and
// the trace accumulated by the difference-count reduction. Writes a truncation
// error estimate (the change between the full- and half-radius evaluations).
double bm_contraction_norm_sq_approx(long long n, int rank, double hurst, int r,
                                     long long block_lo, long long block_hi,
                                     double sigma_sq_value, double dt, long long radius,
                                     double* error_estimate = nullptr);

struct BmReport {
  std::vector<double> x;          // per-increment fourth cumulants
  std::vector<double> x_error;    // truncation error estimates (zero in exact mode)
  std::vector<double> y;          // per-increment variances
  Eigen::MatrixXd gram;           // cross covariances
  double m = 0;                   // psi evaluated on (x, y)
  double dw_thm8 = 0;             // ||C||^{1/2} ||C^{-1}|| m
};

// Bound inputs for the vector of normalized increments of the rank-q
// functional at the configured times.
BmReport bm_vector_report(const BmConfig& cfg);

// Theoretical decay exponent of M(F_n): -1/4, (H-1)/2 or (2qH-2q+1)/4 per the
// three Hurst regimes. Requires H < 1 - 1/(2q).
double theoretical_rate(int rank, double hurst);

struct BmRatePoint {
  long long n;
  double m;
  double dw_thm8;
  double slope;  // log2(M(n_k)/M(n_{k-1})) / log2(n_k/n_{k-1}); NaN for the first point
  std::vector<double> x;
};

struct BmRateResult {
  std::vector<BmRatePoint> points;
  double last_slope;
  double aitken_slope;  // Aitken extrapolation of the slope sequence
};

BmRateResult bm_rate_experiment(const BmConfig& base, std::span<const long long> n_list);

}  // namespace freeprob
