#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "freeprob/kernel.hpp"

namespace freeprob {

// Even moments of the centered semicircle law of the given variance:
// catalan(k/2) * var^{k/2}; odd moments vanish. k <= 30.
double semicircle_moment(int k, double variance);

// Mixed moment of a semicircular family with covariance C: sum over
// non-crossing pairings of products of covariance entries. Indices 1-based.
double family_moment(const Eigen::MatrixXd& c, std::span<const int> indices);

// Same with all pairings weighted q^crossings; q in [-1,1], q^0 = 1.
double q_family_moment(const Eigen::MatrixXd& c, double q, std::span<const int> indices);

// <g_1 x..x g_n, h_1 x..x h_m>_q = delta_{n,m} sum over permutations of
// q^inversions * prod <g_i, h_sigma(i)>. n, m <= 8.
Complex q_fock_inner(std::span<const Eigen::VectorXcd> g, std::span<const Eigen::VectorXcd> h,
                     double q);

// Linearization of I_n(f) I_m(g): the min(n,m)+1 contraction kernels, indexed
// by the contraction order p.
std::vector<Kernel> wigner_product(const Kernel& f, const Kernel& g);

// tau(I_{n_1}(f_1) ... I_{n_r}(f_r)) computed by the iterated product formula.
// Odd total order returns 0. Total order <= 16.
Complex wigner_joint_moment(std::span<const Kernel> fs);

struct FourthMoment {
  double lhs;     // tau(|I_n(f)|^4) by the product route
  double rhs;     // 2*inner(f,f)^2 + sum of squared contraction norms
  double excess;  // rhs - 2*inner(f,f)^2, the fourth free cumulant (>= 0)
};

// Requires mirror-symmetric f; |lhs - rhs| small is the identity under test.
FourthMoment fourth_moment_identity(const Kernel& f);

// tau((f* f)^m)^(1/2m), a lower estimate of the operator norm of I_n(f).
// Requires 2*m*order <= 16.
double opnorm_estimate(const Kernel& f, int m);

// opnorm_estimate at the largest power the cap allows, tested against the
// (n+1) ||f||_2 operator-norm bound with relative slack 1e-9.
bool haagerup_check(const Kernel& f);

// ||grad I_q(f)||^2 over the biprocesses: q * inner(f,f).
double grad_norm_sq(int chaos_order, const Kernel& f);

// Tuple of chaos components (order q_i >= 1, kernel f_i) with its Gram matrix
// gram(i,j) = inner(f_j, f_i) when q_i = q_j, else 0.
class WignerVector {
 public:
  struct Component {
    int order;
    Kernel kernel;
    bool mirror_symmetric;
  };

  static WignerVector from_components(std::vector<std::pair<int, Kernel>> comps);

  int size() const { return static_cast<int>(comps_.size()); }
  const Component& component(int i) const { return comps_[i]; }
  const std::vector<Component>& components() const { return comps_; }
  bool all_mirror_symmetric() const;
  Eigen::MatrixXd gram() const;

 private:
  std::vector<Component> comps_;
};

}  // namespace freeprob
