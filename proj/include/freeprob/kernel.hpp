#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freeprob/pairings.hpp"

namespace freeprob {

using Complex = std::complex<double>;

// Dense order-n tensor on a uniform grid of N points with cell width h,
// standing in for an element of L^2(R_+^n). Entries are complex; storage is
// row-major (first index slowest). Order 0 is a single scalar.
class Kernel {
 public:
  Kernel() : data_(Eigen::VectorXcd::Zero(1)) {}
  Kernel(int order, int grid_n, double cell_width);
  static Kernel scalar(Complex value, int grid_n, double cell_width);

  int order() const { return order_; }
  int grid_n() const { return grid_; }
  double cell_width() const { return h_; }
  Eigen::Index size() const { return data_.size(); }

  Complex& operator[](Eigen::Index flat) { return data_[flat]; }
  Complex operator[](Eigen::Index flat) const { return data_[flat]; }
  Complex& at(std::span<const int> idx);
  Complex at(std::span<const int> idx) const;

  Eigen::VectorXcd& data() { return data_; }
  const Eigen::VectorXcd& data() const { return data_; }

  bool same_shape(const Kernel& other) const;
  Complex scalar_value() const;  // order-0 only

  Kernel& operator+=(const Kernel& other);
  Kernel& operator*=(Complex c);

 private:
  int order_ = 0;
  int grid_ = 1;
  double h_ = 1.0;
  Eigen::VectorXcd data_;
};

Kernel operator+(Kernel lhs, const Kernel& rhs);
Kernel operator*(Complex c, Kernel k);

// f*(t_1..t_n) = conj f(t_n..t_1); an exact involution.
Kernel adjoint(const Kernel& f);
bool is_mirror_symmetric(const Kernel& f, double tol = 1e-12);
Kernel mirror_symmetrize(const Kernel& f);  // (f + f*)/2

// h^n * sum conj(f)*g; conjugate-linear in the first argument.
Complex inner(const Kernel& f, const Kernel& g);
double norm_sq(const Kernel& f);
double kernel_norm(const Kernel& f);

// Contraction of order p: the trailing p slots of f, in reversed order, are
// integrated against the leading p slots of g (weight h per contracted slot).
// p = 0 is the outer tensor product.
Kernel contract(const Kernel& f, const Kernel& g, int p);

// Integral of f_1 x ... x f_r with time slots identified along the matching;
// one free variable per pair, quadrature weight h per pair.
Complex pairing_integral(std::span<const Kernel> fs, const PairPartition& pi);
Complex pairing_integral(std::span<const Kernel> fs, std::span<const std::pair<int, int>> pairs);

// Slot k (1-based) fixed at grid index t, remaining slots in original order.
Kernel slice(const Kernel& f, int k, int t);
// Conjugated slice with the remaining slots reordered to
// (t_{k-1},...,t_1,t_n,...,t_{k+1}); the adjoint of the split slice.
Kernel tilde_slice(const Kernel& f, int k, int t);

// Named constructions.
Kernel rank_one(std::span<const Eigen::VectorXcd> factors, double cell_width);
Kernel random_kernel(int order, int grid_n, double cell_width, std::uint64_t seed,
                     bool mirror = false);

// Text format: header "order N h", then entries in row-major order, each as
// "re im". Round-trips exactly.
std::string to_text(const Kernel& f);
Kernel kernel_from_text(std::string_view text);
void write_kernel(std::ostream& os, const Kernel& f);
Kernel read_kernel(std::istream& is);

}  // namespace freeprob
