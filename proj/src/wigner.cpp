#include "freeprob/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "freeprob/pairings.hpp"

namespace freeprob {

namespace {

constexpr int kTotalOrderCap = 16;

double int_pow(double q, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= q;
  return r;
}

}  // namespace

double semicircle_moment(int k, double variance) {
  if (k < 0 || k > 30) throw std::invalid_argument("semicircle_moment: order must be in [0,30]");
  if (variance < 0) throw std::invalid_argument("semicircle_moment: variance must be nonnegative");
  if (k % 2 == 1) return 0.0;
  return static_cast<double>(catalan(k / 2)) * std::pow(variance, k / 2);
}

namespace {

double pairing_moment(const Eigen::MatrixXd& c, std::span<const int> indices, const double* q) {
  if (c.rows() != c.cols()) throw std::invalid_argument("family_moment: covariance must be square");
  const int k = static_cast<int>(indices.size());
  if (k > kTotalOrderCap) throw std::length_error("family_moment: word length exceeds 16");
  const int n = static_cast<int>(c.rows());
  for (int v : indices)
    if (v < 1 || v > n) throw std::invalid_argument("family_moment: index out of range");
  if (k % 2 == 1) return 0.0;
  if (k == 0) return 1.0;

  double total = 0.0;
  for_each_pair_partition(k / 2, [&](std::span<const std::pair<int, int>> pairs, int cr) {
    if (!q && cr != 0) return;
    double prod = q ? int_pow(*q, cr) : 1.0;
    for (const auto& [a, b] : pairs) prod *= c(indices[a - 1] - 1, indices[b - 1] - 1);
    total += prod;
  });
  return total;
}

}  // namespace

double family_moment(const Eigen::MatrixXd& c, std::span<const int> indices) {
  return pairing_moment(c, indices, nullptr);
}

double q_family_moment(const Eigen::MatrixXd& c, double q, std::span<const int> indices) {
  if (q < -1.0 || q > 1.0) throw std::invalid_argument("q_family_moment: q must lie in [-1,1]");
  return pairing_moment(c, indices, &q);
}

Complex q_fock_inner(std::span<const Eigen::VectorXcd> g, std::span<const Eigen::VectorXcd> h,
                     double q) {
  if (g.size() != h.size()) return 0.0;
  const int n = static_cast<int>(g.size());
  if (n > 8) throw std::length_error("q_fock_inner: tensor rank capped at 8");
  if (n == 0) return 1.0;

  Eigen::MatrixXcd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = g[i].dot(h[j]);  // conjugate-linear in g

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Complex total = 0.0;
  do {
    long long inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inv;
    Complex prod = int_pow(q, static_cast<int>(inv));
    for (int i = 0; i < n; ++i) prod *= gram(i, perm[i]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

std::vector<Kernel> wigner_product(const Kernel& f, const Kernel& g) {
  const int top = std::min(f.order(), g.order());
  std::vector<Kernel> out;
  out.reserve(top + 1);
  for (int p = 0; p <= top; ++p) out.push_back(contract(f, g, p));
  return out;
}

Complex wigner_joint_moment(std::span<const Kernel> fs) {
  if (fs.empty()) return 1.0;
  int total = 0;
  for (const auto& f : fs) total += f.order();
  for (std::size_t i = 1; i < fs.size(); ++i)
    if (fs[i].grid_n() != fs[0].grid_n() || fs[i].cell_width() != fs[0].cell_width())
      throw std::invalid_argument("wigner_joint_moment: kernels live on different grids");
  if (total > kTotalOrderCap) throw std::length_error("wigner_joint_moment: total order exceeds 16");
  if (total % 2 == 1) return 0.0;

  // chaos decomposition of the running product, keyed by order; components
  // whose order exceeds what the remaining factors can contract away are
  // dropped since they cannot reach order zero
  std::map<int, Kernel> state;
  state.emplace(fs[0].order(), fs[0]);
  int remaining = total - fs[0].order();
  for (std::size_t j = 1; j < fs.size(); ++j) {
    const Kernel& g = fs[j];
    remaining -= g.order();
    std::map<int, Kernel> next;
    for (const auto& [ord, k] : state) {
      for (int p = 0; p <= std::min(ord, g.order()); ++p) {
        const int out_ord = ord + g.order() - 2 * p;
        if (out_ord > remaining) continue;
        Kernel c = contract(k, g, p);
        auto it = next.find(out_ord);
        if (it == next.end())
          next.emplace(out_ord, std::move(c));
        else
          it->second += c;
      }
    }
    state = std::move(next);
  }
  auto it = state.find(0);
  return it == state.end() ? Complex(0.0) : it->second.scalar_value();
}

FourthMoment fourth_moment_identity(const Kernel& f) {
  const double scale = f.size() ? f.data().cwiseAbs().maxCoeff() : 0.0;
  if (!is_mirror_symmetric(f, 1e-9 * std::max(1.0, scale)))
    throw std::invalid_argument("fourth_moment_identity: kernel must be mirror-symmetric");
  const Kernel word[4] = {f, f, f, f};
  FourthMoment out{};
  out.lhs = std::real(wigner_joint_moment(word));
  const double y = std::real(inner(f, f));
  out.excess = 0.0;
  Kernel fstar = adjoint(f);
  for (int p = 1; p <= f.order() - 1; ++p) out.excess += norm_sq(contract(f, fstar, p));
  out.rhs = 2.0 * y * y + out.excess;
  return out;
}

double opnorm_estimate(const Kernel& f, int m) {
  if (m < 1) throw std::invalid_argument("opnorm_estimate: power must be positive");
  if (2 * m * f.order() > kTotalOrderCap)
    throw std::length_error("opnorm_estimate: 2*m*order exceeds 16");
  if (f.order() == 0) return std::abs(f.scalar_value());
  std::vector<Kernel> word;
  word.reserve(2 * m);
  Kernel fstar = adjoint(f);
  for (int i = 0; i < m; ++i) {
    word.push_back(fstar);
    word.push_back(f);
  }
  const double val = std::max(0.0, std::real(wigner_joint_moment(word)));
  return std::pow(val, 1.0 / (2.0 * m));
}

bool haagerup_check(const Kernel& f) {
  const int n = f.order();
  if (n == 0) return std::abs(f.scalar_value()) <= std::abs(f.scalar_value()) * (1 + 1e-9);
  const int m = std::max(1, kTotalOrderCap / (2 * n));
  const double estimate = opnorm_estimate(f, m);
  return estimate <= (n + 1) * kernel_norm(f) * (1.0 + 1e-9);
}

double grad_norm_sq(int chaos_order, const Kernel& f) {
  if (chaos_order != f.order()) throw std::invalid_argument("grad_norm_sq: order mismatch");
  return chaos_order * norm_sq(f);
}

WignerVector WignerVector::from_components(std::vector<std::pair<int, Kernel>> comps) {
  WignerVector out;
  out.comps_.reserve(comps.size());
  for (auto& [order, kernel] : comps) {
    if (order < 1) throw std::invalid_argument("WignerVector: chaos order must be >= 1");
    if (order != kernel.order())
      throw std::invalid_argument("WignerVector: declared order does not match the kernel");
    if (!out.comps_.empty() &&
        (kernel.grid_n() != out.comps_[0].kernel.grid_n() ||
         kernel.cell_width() != out.comps_[0].kernel.cell_width()))
      throw std::invalid_argument("WignerVector: kernels live on different grids");
    const double scale = std::max(1.0, kernel.data().cwiseAbs().maxCoeff());
    bool mirror = is_mirror_symmetric(kernel, 1e-9 * scale);
    out.comps_.push_back({order, std::move(kernel), mirror});
  }
  return out;
}

bool WignerVector::all_mirror_symmetric() const {
  for (const auto& c : comps_)
    if (!c.mirror_symmetric) return false;
  return true;
}

Eigen::MatrixXd WignerVector::gram() const {
  const int n = size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (comps_[i].order != comps_[j].order) continue;
      const Complex v = inner(comps_[j].kernel, comps_[i].kernel);
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
        throw std::invalid_argument("WignerVector: Gram matrix is not real");
      g(i, j) = v.real();
    }
  return g;
}

}  // namespace freeprob
