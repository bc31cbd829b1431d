#include "freeprob/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "freeprob/rng.hpp"

namespace freeprob {

namespace {

Eigen::Index pow_index(int base, int exp) {
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > (Eigen::Index(1) << 40)) throw std::length_error("kernel tensor too large");
  }
  return r;
}

using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void format_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

Kernel::Kernel(int order, int grid_n, double cell_width)
    : order_(order), grid_(grid_n), h_(cell_width) {
  if (order < 0) throw std::invalid_argument("kernel order must be nonnegative");
  if (grid_n < 1) throw std::invalid_argument("kernel grid must have at least one point");
  if (!(cell_width > 0.0)) throw std::invalid_argument("kernel cell width must be positive");
  data_ = Eigen::VectorXcd::Zero(pow_index(grid_, order_));
}

Kernel Kernel::scalar(Complex value, int grid_n, double cell_width) {
  Kernel k(0, grid_n, cell_width);
  k.data_[0] = value;
  return k;
}

namespace {

Eigen::Index flat_index(std::span<const int> idx, int order, int grid) {
  if (static_cast<int>(idx.size()) != order) throw std::invalid_argument("kernel index arity mismatch");
  Eigen::Index flat = 0;
  for (int i : idx) {
    if (i < 0 || i >= grid) throw std::out_of_range("kernel grid index out of range");
    flat = flat * grid + i;
  }
  return flat;
}

}  // namespace

Complex& Kernel::at(std::span<const int> idx) { return data_[flat_index(idx, order_, grid_)]; }

Complex Kernel::at(std::span<const int> idx) const { return data_[flat_index(idx, order_, grid_)]; }

bool Kernel::same_shape(const Kernel& other) const {
  return order_ == other.order_ && grid_ == other.grid_ && h_ == other.h_;
}

Complex Kernel::scalar_value() const {
  if (order_ != 0) throw std::logic_error("scalar_value on a kernel of positive order");
  return data_[0];
}

Kernel& Kernel::operator+=(const Kernel& other) {
  if (!same_shape(other)) throw std::invalid_argument("kernel shape mismatch");
  data_ += other.data_;
  return *this;
}

Kernel& Kernel::operator*=(Complex c) {
  data_ *= c;
  return *this;
}

Kernel operator+(Kernel lhs, const Kernel& rhs) {
  lhs += rhs;
  return lhs;
}

Kernel operator*(Complex c, Kernel k) {
  k *= c;
  return k;
}

Kernel adjoint(const Kernel& f) {
  const int n = f.order(), N = f.grid_n();
  Kernel out(n, N, f.cell_width());
  if (n <= 1) {
    out.data() = f.data().conjugate();
    return out;
  }
  const Eigen::Index total = f.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    // reversed index of `flat`
    Eigen::Index rev = 0;
    Eigen::Index rest = flat;
    for (int k = 0; k < n; ++k) {
      rev = rev * N + rest % N;
      rest /= N;
    }
    out[flat] = std::conj(f[rev]);
  }
  return out;
}

bool is_mirror_symmetric(const Kernel& f, double tol) {
  if (tol < 0) throw std::invalid_argument("tolerance must be nonnegative");
  Kernel g = adjoint(f);
  return (f.data() - g.data()).cwiseAbs().maxCoeff() <= tol;
}

Kernel mirror_symmetrize(const Kernel& f) {
  Kernel out = adjoint(f);
  out += f;
  out *= 0.5;
  return out;
}

Complex inner(const Kernel& f, const Kernel& g) {
  if (!f.same_shape(g)) throw std::invalid_argument("inner: kernel shape mismatch");
  const double w = std::pow(f.cell_width(), f.order());
  return w * f.data().dot(g.data());  // Eigen dot conjugates the first factor
}

double norm_sq(const Kernel& f) { return std::real(inner(f, f)); }

double kernel_norm(const Kernel& f) { return std::sqrt(std::max(0.0, norm_sq(f))); }

Kernel contract(const Kernel& f, const Kernel& g, int p) {
  if (f.grid_n() != g.grid_n() || f.cell_width() != g.cell_width())
    throw std::invalid_argument("contract: kernels live on different grids");
  const int n = f.order(), m = g.order(), N = f.grid_n();
  if (p < 0 || p > std::min(n, m)) throw std::invalid_argument("contract: order out of range");

  const Eigen::Index rows = pow_index(N, n - p);
  const Eigen::Index K = pow_index(N, p);
  const Eigen::Index cols = pow_index(N, m - p);

  // F[a, s_1..s_p] = f[a, s_p..s_1]
  RowMat F(rows, K);
  std::vector<Eigen::Index> rev(K);
  for (Eigen::Index s = 0; s < K; ++s) {
    Eigen::Index r = 0, rest = s;
    for (int k = 0; k < p; ++k) {
      r = r * N + rest % N;
      rest /= N;
    }
    rev[s] = r;
  }
  for (Eigen::Index a = 0; a < rows; ++a)
    for (Eigen::Index s = 0; s < K; ++s) F(a, s) = f[a * K + rev[s]];

  Eigen::Map<const RowMat> G(g.data().data(), K, cols);
  Kernel out(n + m - 2 * p, N, f.cell_width());
  Eigen::Map<RowMat> O(out.data().data(), rows, cols);
  O.noalias() = std::pow(f.cell_width(), p) * (F * G);
  return out;
}

Complex pairing_integral(std::span<const Kernel> fs, std::span<const std::pair<int, int>> pairs) {
  if (fs.empty()) throw std::invalid_argument("pairing integral needs at least one kernel");
  const int N = fs[0].grid_n();
  const double h = fs[0].cell_width();
  int total = 0;
  for (const auto& f : fs) {
    if (f.grid_n() != N || f.cell_width() != h)
      throw std::invalid_argument("pairing integral: kernels live on different grids");
    total += f.order();
  }
  if (static_cast<int>(pairs.size()) * 2 != total)
    throw std::invalid_argument("pairing integral: matching does not cover the slots");

  const int P = static_cast<int>(pairs.size());
  // slot (1-based, concatenated across kernels) -> pair index
  std::vector<int> pair_of(total + 1, -1);
  for (int ip = 0; ip < P; ++ip) {
    auto [a, b] = pairs[ip];
    if (a < 1 || b < 1 || a > total || b > total || pair_of[a] != -1 || pair_of[b] != -1)
      throw std::invalid_argument("pairing integral: invalid matching");
    pair_of[a] = pair_of[b] = ip;
  }

  // per kernel: the pair index driving each of its slots
  std::vector<std::vector<int>> slot_pairs(fs.size());
  {
    int slot = 1;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      slot_pairs[i].resize(fs[i].order());
      for (int k = 0; k < fs[i].order(); ++k) slot_pairs[i][k] = pair_of[slot++];
    }
  }

  std::vector<int> s(P, 0);  // one grid value per pair
  Complex sum = 0.0;
  while (true) {
    Complex prod = 1.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      Eigen::Index flat = 0;
      for (int pi : slot_pairs[i]) flat = flat * N + s[pi];
      prod *= fs[i][flat];
      if (prod == 0.0) break;
    }
    sum += prod;
    int k = P - 1;
    while (k >= 0 && s[k] == N - 1) s[k--] = 0;
    if (k < 0) break;
    ++s[k];
  }
  return std::pow(h, P) * sum;
}

Complex pairing_integral(std::span<const Kernel> fs, const PairPartition& pi) {
  return pairing_integral(fs, std::span<const std::pair<int, int>>(pi.pairs));
}

Kernel slice(const Kernel& f, int k, int t) {
  const int n = f.order(), N = f.grid_n();
  if (k < 1 || k > n) throw std::out_of_range("slice: slot index out of range");
  if (t < 0 || t >= N) throw std::out_of_range("slice: grid index out of range");
  Kernel out(n - 1, N, f.cell_width());
  const Eigen::Index pre = pow_index(N, k - 1);
  const Eigen::Index post = pow_index(N, n - k);
  for (Eigen::Index a = 0; a < pre; ++a) {
    const Eigen::Index src_base = (a * N + t) * post;
    out.data().segment(a * post, post) = f.data().segment(src_base, post);
  }
  return out;
}

Kernel tilde_slice(const Kernel& f, int k, int t) {
  const int n = f.order(), N = f.grid_n();
  if (k < 1 || k > n) throw std::out_of_range("tilde_slice: slot index out of range");
  if (t < 0 || t >= N) throw std::out_of_range("tilde_slice: grid index out of range");
  Kernel out(n - 1, N, f.cell_width());
  // out[j_1..j_{n-1}] = conj f[j_{k-1},...,j_1, t, j_{n-1},...,j_k]
  std::vector<int> j(std::max(n - 1, 1), 0);
  std::vector<int> src(n, 0);
  const Eigen::Index total = out.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    {
      Eigen::Index rest = flat;
      for (int i = n - 2; i >= 0; --i) {
        j[i] = static_cast<int>(rest % N);
        rest /= N;
      }
    }
    for (int i = 0; i < k - 1; ++i) src[i] = j[k - 2 - i];
    src[k - 1] = t;
    for (int i = k; i < n; ++i) src[i] = j[n - 2 - (i - k)];
    Eigen::Index sflat = 0;
    for (int i = 0; i < n; ++i) sflat = sflat * N + src[i];
    out[flat] = std::conj(f[sflat]);
  }
  return out;
}

Kernel rank_one(std::span<const Eigen::VectorXcd> factors, double cell_width) {
  if (factors.empty()) throw std::invalid_argument("rank_one: needs at least one factor");
  const int N = static_cast<int>(factors[0].size());
  for (const auto& v : factors)
    if (v.size() != N) throw std::invalid_argument("rank_one: factor length mismatch");
  Kernel out(static_cast<int>(factors.size()), N, cell_width);
  const int n = out.order();
  for (Eigen::Index flat = 0; flat < out.size(); ++flat) {
    Complex prod = 1.0;
    Eigen::Index rest = flat;
    for (int i = n - 1; i >= 0; --i) {
      prod *= factors[i][rest % N];
      rest /= N;
    }
    out[flat] = prod;
  }
  return out;
}

Kernel random_kernel(int order, int grid_n, double cell_width, std::uint64_t seed, bool mirror) {
  Kernel out(order, grid_n, cell_width);
  SeedStream rng = SeedStream::derive(seed, 0x6b65726eULL);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    auto [re, im] = rng.gaussian_pair_at(static_cast<std::uint64_t>(i));
    out[i] = Complex(re, im);
  }
  if (mirror) out = mirror_symmetrize(out);
  return out;
}

std::string to_text(const Kernel& f) {
  std::string out;
  out += std::to_string(f.order());
  out += ' ';
  out += std::to_string(f.grid_n());
  out += ' ';
  format_double(out, f.cell_width());
  out += '\n';
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    format_double(out, f[i].real());
    out += ' ';
    format_double(out, f[i].imag());
    out += '\n';
  }
  return out;
}

void write_kernel(std::ostream& os, const Kernel& f) { os << to_text(f); }

Kernel read_kernel(std::istream& is) {
  int order, grid;
  double h;
  if (!(is >> order >> grid >> h)) throw std::runtime_error("kernel text: bad header");
  Kernel out(order, grid, h);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double re, im;
    if (!(is >> re >> im)) throw std::runtime_error("kernel text: truncated entries");
    if (!std::isfinite(re) || !std::isfinite(im))
      throw std::runtime_error("kernel text: non-finite entry");
    out[i] = Complex(re, im);
  }
  return out;
}

Kernel kernel_from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_kernel(is);
}

}  // namespace freeprob
