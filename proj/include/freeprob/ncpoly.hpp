#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freeprob/spd.hpp"

namespace freeprob {

using PolyComplex = std::complex<double>;
using Word = std::vector<int>;  // indeterminate indices, 1-based; empty word = unit

// Noncommutative polynomial in self-adjoint indeterminates t_1..t_n:
// a finite map word -> complex coefficient with no zero coefficients stored.
class NcPolynomial {
 public:
  NcPolynomial() = default;
  explicit NcPolynomial(int n_vars) : n_vars_(n_vars) {}

  static NcPolynomial unit(int n_vars);
  static NcPolynomial variable(int n_vars, int j);
  static NcPolynomial monomial(int n_vars, Word w, PolyComplex c = 1.0);

  int n_vars() const { return n_vars_; }
  const std::map<Word, PolyComplex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  void add_term(const Word& w, PolyComplex c);

  NcPolynomial& operator+=(const NcPolynomial& p);
  NcPolynomial& operator-=(const NcPolynomial& p);
  NcPolynomial& operator*=(PolyComplex c);
  NcPolynomial operator*(const NcPolynomial& p) const;  // word concatenation

  NcPolynomial adjoint() const;  // reverse each word, conjugate coefficients

 private:
  void check_word(const Word& w) const;
  int n_vars_ = 0;
  std::map<Word, PolyComplex> terms_;
};

NcPolynomial operator+(NcPolynomial a, const NcPolynomial& b);
NcPolynomial operator-(NcPolynomial a, const NcPolynomial& b);
NcPolynomial operator*(PolyComplex c, NcPolynomial p);

// Element of P (x) P^op: map from word pairs to coefficients.
class NcBiPolynomial {
 public:
  NcBiPolynomial() = default;
  explicit NcBiPolynomial(int n_vars) : n_vars_(n_vars) {}

  int n_vars() const { return n_vars_; }
  const std::map<std::pair<Word, Word>, PolyComplex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Word& left, const Word& right, PolyComplex c);

  NcBiPolynomial& operator+=(const NcBiPolynomial& p);
  NcBiPolynomial flip() const;  // a(x)b -> b(x)a

 private:
  int n_vars_ = 0;
  std::map<std::pair<Word, Word>, PolyComplex> terms_;
};

// D_j on a monomial m: sum over factorizations m = a t_j b of the word ba.
NcPolynomial cyclic_derivative(const NcPolynomial& p, int j);

// j-th free difference quotient: sum over m = a t_j b of a (x) b.
NcBiPolynomial difference_quotient(const NcPolynomial& p, int j);

// Entry (i,j) = difference_quotient(p_i, j); all entries share n_vars.
std::vector<std::vector<NcBiPolynomial>> jacobian(std::span<const NcPolynomial> p);

// Collapses a (x) b to b*a; cyclic_derivative == multiply_flip(difference_quotient).
NcPolynomial multiply_flip(const NcBiPolynomial& p);

// Law of a (q-)semicircular family: covariance plus optional q. Without q the
// moments run over non-crossing pairings; with q over all pairings weighted
// q^crossings. q = +-1 is accepted (the moment polynomial is defined there).
struct FamilyLaw {
  Eigen::MatrixXd covariance;
  std::optional<double> q;
};

PolyComplex expectation(const NcPolynomial& p, const FamilyLaw& law);
PolyComplex expectation_tensor(const NcBiPolynomial& p, const FamilyLaw& law);  // tau (x) tau

// The quadratic potential 1/2 sum C^{-1}_{ij} t_i t_j whose cyclic gradient is
// C^{-1} T.
NcPolynomial quadratic_potential(const SpdCovariance& c);

// max_j | <(C^{-1}T)_j, P_j> - (tau(x)tau)(d_j P_j) | under the semicircular-C
// law; zero exactly when the law satisfies the integration-by-parts identity.
double schwinger_dyson_residual(std::span<const NcPolynomial> p, const SpdCovariance& c);

// Text form, e.g. "0.5*t1*t2 + t2*t1" or "(0+1i)*t1^3 - 2". Round-trips.
std::string to_string(const NcPolynomial& p);
NcPolynomial parse_polynomial(std::string_view text, int n_vars);

}  // namespace freeprob
