#include "freeprob/ncpoly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "freeprob/pairings.hpp"

namespace freeprob {

namespace {

constexpr int kDegreeCap = 16;  // shared with the pairing enumeration cap

double int_pow(double q, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= q;
  return r;
}

}  // namespace

NcPolynomial NcPolynomial::unit(int n_vars) {
  NcPolynomial p(n_vars);
  p.add_term({}, 1.0);
  return p;
}

NcPolynomial NcPolynomial::variable(int n_vars, int j) {
  NcPolynomial p(n_vars);
  p.add_term({j}, 1.0);
  return p;
}

NcPolynomial NcPolynomial::monomial(int n_vars, Word w, PolyComplex c) {
  NcPolynomial p(n_vars);
  p.add_term(w, c);
  return p;
}

void NcPolynomial::check_word(const Word& w) const {
  for (int v : w)
    if (v < 1 || v > n_vars_) throw std::invalid_argument("indeterminate index out of range");
}

int NcPolynomial::degree() const {
  int d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
  return d;
}

void NcPolynomial::add_term(const Word& w, PolyComplex c) {
  check_word(w);
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    if (c != 0.0) terms_.emplace(w, c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

NcPolynomial& NcPolynomial::operator+=(const NcPolynomial& p) {
  if (n_vars_ != p.n_vars_) throw std::invalid_argument("polynomial variable count mismatch");
  for (const auto& [w, c] : p.terms_) add_term(w, c);
  return *this;
}

NcPolynomial& NcPolynomial::operator-=(const NcPolynomial& p) {
  if (n_vars_ != p.n_vars_) throw std::invalid_argument("polynomial variable count mismatch");
  for (const auto& [w, c] : p.terms_) add_term(w, -c);
  return *this;
}

NcPolynomial& NcPolynomial::operator*=(PolyComplex c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, coef] : terms_) coef *= c;
  return *this;
}

NcPolynomial NcPolynomial::operator*(const NcPolynomial& p) const {
  if (n_vars_ != p.n_vars_) throw std::invalid_argument("polynomial variable count mismatch");
  NcPolynomial out(n_vars_);
  for (const auto& [w1, c1] : terms_)
    for (const auto& [w2, c2] : p.terms_) {
      Word w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      out.add_term(w, c1 * c2);
    }
  return out;
}

NcPolynomial NcPolynomial::adjoint() const {
  NcPolynomial out(n_vars_);
  for (const auto& [w, c] : terms_) {
    Word r(w.rbegin(), w.rend());
    out.add_term(r, std::conj(c));
  }
  return out;
}

NcPolynomial operator+(NcPolynomial a, const NcPolynomial& b) {
  a += b;
  return a;
}

NcPolynomial operator-(NcPolynomial a, const NcPolynomial& b) {
  a -= b;
  return a;
}

NcPolynomial operator*(PolyComplex c, NcPolynomial p) {
  p *= c;
  return p;
}

void NcBiPolynomial::add_term(const Word& left, const Word& right, PolyComplex c) {
  auto key = std::make_pair(left, right);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (c != 0.0) terms_.emplace(std::move(key), c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

NcBiPolynomial& NcBiPolynomial::operator+=(const NcBiPolynomial& p) {
  if (n_vars_ != p.n_vars_) throw std::invalid_argument("polynomial variable count mismatch");
  for (const auto& [key, c] : p.terms_) add_term(key.first, key.second, c);
  return *this;
}

NcBiPolynomial NcBiPolynomial::flip() const {
  NcBiPolynomial out(n_vars_);
  for (const auto& [key, c] : terms_) out.add_term(key.second, key.first, c);
  return out;
}

NcPolynomial cyclic_derivative(const NcPolynomial& p, int j) {
  if (j < 1 || j > p.n_vars()) throw std::invalid_argument("cyclic_derivative: index out of range");
  NcPolynomial out(p.n_vars());
  for (const auto& [w, c] : p.terms()) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != j) continue;
      Word ba(w.begin() + i + 1, w.end());
      ba.insert(ba.end(), w.begin(), w.begin() + i);
      out.add_term(ba, c);
    }
  }
  return out;
}

NcBiPolynomial difference_quotient(const NcPolynomial& p, int j) {
  if (j < 1 || j > p.n_vars()) throw std::invalid_argument("difference_quotient: index out of range");
  NcBiPolynomial out(p.n_vars());
  for (const auto& [w, c] : p.terms()) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != j) continue;
      Word a(w.begin(), w.begin() + i);
      Word b(w.begin() + i + 1, w.end());
      out.add_term(a, b, c);
    }
  }
  return out;
}

std::vector<std::vector<NcBiPolynomial>> jacobian(std::span<const NcPolynomial> p) {
  if (p.empty()) return {};
  const int n = p[0].n_vars();
  for (const auto& q : p)
    if (q.n_vars() != n) throw std::invalid_argument("jacobian: mixed variable counts");
  std::vector<std::vector<NcBiPolynomial>> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i].reserve(n);
    for (int j = 1; j <= n; ++j) out[i].push_back(difference_quotient(p[i], j));
  }
  return out;
}

NcPolynomial multiply_flip(const NcBiPolynomial& p) {
  NcPolynomial out(p.n_vars());
  for (const auto& [key, c] : p.terms()) {
    Word w = key.second;
    w.insert(w.end(), key.first.begin(), key.first.end());
    out.add_term(w, c);
  }
  return out;
}

namespace {

// tau of a single word under the family law
double word_expectation(const Word& w, const FamilyLaw& law) {
  const int k = static_cast<int>(w.size());
  if (k == 0) return 1.0;
  if (k % 2 == 1) return 0.0;
  if (k > kDegreeCap) throw std::length_error("expectation: monomial degree exceeds 16");
  const auto& c = law.covariance;
  const int n = static_cast<int>(c.rows());
  for (int v : w)
    if (v > n) throw std::invalid_argument("expectation: covariance too small for the word");

  double total = 0.0;
  if (law.q) {
    const double q = *law.q;
    for_each_pair_partition(k / 2, [&](std::span<const std::pair<int, int>> pairs, int cr) {
      double prod = int_pow(q, cr);
      for (const auto& [a, b] : pairs) prod *= c(w[a - 1] - 1, w[b - 1] - 1);
      total += prod;
    });
  } else {
    for_each_pair_partition(k / 2, [&](std::span<const std::pair<int, int>> pairs, int cr) {
      if (cr != 0) return;
      double prod = 1.0;
      for (const auto& [a, b] : pairs) prod *= c(w[a - 1] - 1, w[b - 1] - 1);
      total += prod;
    });
  }
  return total;
}

}  // namespace

namespace {

void check_law(const FamilyLaw& law) {
  const auto& c = law.covariance;
  if (c.rows() != c.cols() || c.rows() == 0)
    throw std::invalid_argument("expectation: covariance must be square");
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("expectation: covariance not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("expectation: covariance not positive definite");
  if (law.q && (*law.q < -1.0 || *law.q > 1.0))
    throw std::invalid_argument("expectation: q must lie in [-1,1]");
}

}  // namespace

PolyComplex expectation(const NcPolynomial& p, const FamilyLaw& law) {
  check_law(law);
  PolyComplex total = 0.0;
  for (const auto& [w, coef] : p.terms()) total += coef * word_expectation(w, law);
  return total;
}

PolyComplex expectation_tensor(const NcBiPolynomial& p, const FamilyLaw& law) {
  check_law(law);
  PolyComplex total = 0.0;
  for (const auto& [key, coef] : p.terms())
    total += coef * word_expectation(key.first, law) * word_expectation(key.second, law);
  return total;
}

NcPolynomial quadratic_potential(const SpdCovariance& c) {
  const int n = c.dim();
  NcPolynomial v(n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) v.add_term({i, j}, 0.5 * c.inverse()(i - 1, j - 1));
  return v;
}

double schwinger_dyson_residual(std::span<const NcPolynomial> p, const SpdCovariance& c) {
  const int n = c.dim();
  if (static_cast<int>(p.size()) != n)
    throw std::invalid_argument("schwinger_dyson_residual: tuple size must match covariance dim");
  for (const auto& q : p)
    if (q.n_vars() != n) throw std::invalid_argument("schwinger_dyson_residual: variable count mismatch");

  FamilyLaw law{c.matrix(), std::nullopt};
  double worst = 0.0;
  for (int j = 1; j <= n; ++j) {
    // <(C^{-1}T)_j, P_j> = sum_k C^{-1}(j,k) tau(t_k P_j)
    PolyComplex lhs = 0.0;
    for (int k = 1; k <= n; ++k) {
      NcPolynomial tk_pj = NcPolynomial::variable(n, k) * p[j - 1];
      lhs += c.inverse()(j - 1, k - 1) * expectation(tk_pj, law);
    }
    PolyComplex rhs = expectation_tensor(difference_quotient(p[j - 1], j), law);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// ---- text form ----

namespace {

void format_real(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void format_coeff(std::string& out, PolyComplex c) {
  if (c.imag() == 0.0) {
    format_real(out, c.real());
  } else {
    out += '(';
    format_real(out, c.real());
    if (!(c.imag() < 0)) out += '+';
    format_real(out, c.imag());
    out += "i)";
  }
}

void format_word(std::string& out, const Word& w) {
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (i > 0) out += '*';
    out += 't';
    out += std::to_string(w[i]);
    if (j - i > 1) {
      out += '^';
      out += std::to_string(j - i);
    }
    i = j;
  }
}

struct PolyParser {
  std::string_view s;
  std::size_t pos = 0;
  int n_vars;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n')) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("polynomial parse error at position " + std::to_string(pos) + ": " + what);
  }

  double parse_number() {
    skip_ws();
    const char* begin = s.data() + pos;
    const char* end = s.data() + s.size();
    double v;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc()) fail("expected a number");
    pos += static_cast<std::size_t>(res.ptr - begin);
    return v;
  }

  long parse_int() {
    skip_ws();
    const char* begin = s.data() + pos;
    const char* end = s.data() + s.size();
    long v;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc()) fail("expected an integer");
    pos += static_cast<std::size_t>(res.ptr - begin);
    return v;
  }

  PolyComplex parse_coeff() {
    if (eat('(')) {
      double re = parse_number();
      double imsign = 1.0;
      if (eat('-'))
        imsign = -1.0;
      else if (!eat('+'))
        fail("expected '+' or '-' in complex literal");
      double im = imsign * parse_number();
      if (!eat('i')) fail("expected 'i' in complex literal");
      if (!eat(')')) fail("expected ')'");
      return {re, im};
    }
    return parse_number();
  }

  // factor := tK [^E]
  void parse_variable_factors(Word& w) {
    while (true) {
      skip_ws();
      if (pos >= s.size() || s[pos] != 't') fail("expected an indeterminate");
      ++pos;
      long k = parse_int();
      if (k < 1 || k > n_vars) fail("indeterminate index out of range");
      long e = 1;
      if (eat('^')) {
        e = parse_int();
        if (e < 0) fail("negative exponent");
      }
      for (long i = 0; i < e; ++i) w.push_back(static_cast<int>(k));
      if (!eat('*')) break;
    }
  }

  NcPolynomial parse() {
    NcPolynomial out(n_vars);
    bool first = true;
    while (true) {
      skip_ws();
      if (pos >= s.size()) {
        if (first) fail("empty polynomial");
        break;
      }
      double sign = 1.0;
      if (eat('+')) {
      } else if (eat('-')) {
        sign = -1.0;
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      skip_ws();
      PolyComplex coeff = sign;
      Word w;
      char c = peek();
      if (c == 't') {
        parse_variable_factors(w);
      } else {
        coeff = sign * parse_coeff();
        if (eat('*')) parse_variable_factors(w);
      }
      out.add_term(w, coeff);
      skip_ws();
      if (pos >= s.size()) break;
    }
    return out;
  }
};

}  // namespace

std::string to_string(const NcPolynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    PolyComplex coeff = c;
    if (first) {
      first = false;
    } else if (coeff.imag() == 0.0 && coeff.real() < 0) {
      out += " - ";
      coeff = -coeff;
    } else {
      out += " + ";
    }
    if (w.empty()) {
      format_coeff(out, coeff);
    } else if (coeff == PolyComplex(1.0)) {
      format_word(out, w);
    } else {
      format_coeff(out, coeff);
      out += '*';
      format_word(out, w);
    }
  }
  return out;
}

NcPolynomial parse_polynomial(std::string_view text, int n_vars) {
  PolyParser parser{text, 0, n_vars};
  return parser.parse();
}

}  // namespace freeprob
