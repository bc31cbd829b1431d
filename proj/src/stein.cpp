#include "freeprob/stein.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace freeprob {

namespace {

void require_mirror(const Kernel& k, const char* who) {
  const double scale = std::max(1.0, k.data().cwiseAbs().maxCoeff());
  if (!is_mirror_symmetric(k, 1e-9 * scale))
    throw std::invalid_argument(std::string(who) + ": kernel must be mirror-symmetric");
}

// ||u (contract r) u|| for the lemma terms
double contraction_norm(const Kernel& u, int r) { return kernel_norm(contract(u, u, r)); }

}  // namespace

GammaExpansion gamma_discrepancy_expansion(const Kernel& f, const Kernel& g, double a) {
  if (f.order() < 1 || g.order() < 1)
    throw std::invalid_argument("gamma discrepancy needs chaos orders >= 1");
  if (f.grid_n() != g.grid_n() || f.cell_width() != g.cell_width())
    throw std::invalid_argument("gamma discrepancy: kernels live on different grids");
  require_mirror(f, "gamma_discrepancy");
  require_mirror(g, "gamma_discrepancy");

  const int p = f.order(), q = g.order(), N = f.grid_n();
  const double h = f.cell_width();

  GammaExpansion out;
  out.a = a;
  out.has_constant = (p == q);
  out.constant = 0.0;
  out.total = 0.0;

  // slices at the last slot of f, all slots of g
  std::vector<Kernel> f_slices;
  f_slices.reserve(N);
  for (int t = 0; t < N; ++t) f_slices.push_back(slice(f, p, t));

  for (int m = 1; m <= q; ++m) {
    std::vector<Kernel> g_tildes;
    g_tildes.reserve(N);
    for (int t = 0; t < N; ++t) g_tildes.push_back(tilde_slice(g, m, t));
    for (int l = 0; l <= std::min(p, m) - 1; ++l) {
      Kernel acc = contract(f_slices[0], g_tildes[0], l);
      for (int t = 1; t < N; ++t) acc += contract(f_slices[t], g_tildes[t], l);
      acc *= h;  // quadrature over the shared time slot
      const int left = p + m - 2 - 2 * l;
      const int right = q - m;
      if (left == 0 && right == 0) {
        out.constant = acc.scalar_value();
      } else {
        out.terms.push_back({m, l, left, right, norm_sq(acc)});
      }
    }
  }

  if (out.has_constant)
    out.total += std::norm(out.constant - Complex(a));
  else
    out.total += a * a;
  for (const auto& t : out.terms) out.total += t.norm_sq;
  return out;
}

double gamma_discrepancy_sq(const Kernel& f, const Kernel& g, double a) {
  return gamma_discrepancy_expansion(f, g, a).total;
}

double lemma8_rhs(const Kernel& f, const Kernel& g, double a) {
  if (f.order() < 1 || g.order() < 1)
    throw std::invalid_argument("lemma8_rhs needs chaos orders >= 1");
  require_mirror(f, "lemma8_rhs");
  require_mirror(g, "lemma8_rhs");

  const int p = f.order(), q = g.order();
  const double f2 = norm_sq(f), g2 = norm_sq(g);

  // A_{f,g}^{p,l} = ||f (p-l-1-contract) f|| * ||g||^2; available when the
  // (m,l) term keeps p-l-1 > 0 free slots on the f side
  auto a_fg = [&](int l) { return contraction_norm(f, p - l - 1) * g2; };
  // A_{g,f}^{.,m} = ||g (q-m-contract) g|| * ||f||^2; available when m < q
  auto a_gf = [&](int m) { return contraction_norm(g, q - m) * f2; };

  double total = 0.0;
  if (p == q) {
    total += std::norm(Complex(a) - inner(g, f));
    for (int m = 1; m <= p - 1; ++m)
      for (int l = 0; l <= m - 1; ++l) total += std::min(a_fg(l), a_gf(m));
    for (int l = 0; l <= p - 2; ++l) total += std::min(a_fg(l), a_gf(p));
  } else if (p < q) {
    total += a * a;
    total += f2 * contraction_norm(g, q - p);  // (m,l) = (p, p-1): only the g-side move remains
    for (int m = 1; m <= q; ++m) {
      if (m == p) continue;
      for (int l = 0; l <= std::min(p, m) - 1; ++l) total += std::min(a_fg(l), a_gf(m));
    }
    for (int l = 0; l <= p - 2; ++l) total += std::min(a_fg(l), a_gf(p));
  } else {
    // p > q: the mirror adaptation; at m = q the g side has no free slots left
    total += a * a;
    for (int m = 1; m <= q - 1; ++m)
      for (int l = 0; l <= m - 1; ++l) total += std::min(a_fg(l), a_gf(m));
    for (int l = 0; l <= q - 1; ++l) total += a_fg(l);
  }
  return total;
}

double psi(std::span<const double> xs, std::span<const double> ys, std::span<const int> orders) {
  const std::size_t n = xs.size();
  if (ys.size() != n || orders.size() != n)
    throw std::invalid_argument("psi: argument lists must have equal length");
  for (double y : ys)
    if (y < 0) throw std::invalid_argument("psi: variances must be nonnegative");
  for (int q : orders)
    if (q < 1) throw std::invalid_argument("psi: chaos orders must be positive");

  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double base = orders[k] == orders[j] ? orders[k] : std::max(orders[k], orders[j]);
      const double t = std::min(std::pow(std::abs(xs[k]), 0.25) * std::sqrt(ys[j]),
                                std::pow(std::abs(xs[j]), 0.25) * std::sqrt(ys[k]));
      total += std::pow(base, 0.75) * t;
    }
  return total;
}

namespace {

void cumulant_inputs(const WignerVector& f, std::vector<double>& x, std::vector<double>& y,
                     std::vector<int>& orders) {
  const int n = f.size();
  x.resize(n);
  y.resize(n);
  orders.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& c = f.component(i);
    orders[i] = c.order;
    y[i] = std::real(inner(c.kernel, c.kernel));
    const FourthMoment fm = fourth_moment_identity(c.kernel);
    x[i] = fm.lhs - 2.0 * y[i] * y[i];
  }
}

}  // namespace

double m_of_f(const WignerVector& f) {
  std::vector<double> x, y;
  std::vector<int> orders;
  cumulant_inputs(f, x, y, orders);
  return psi(x, y, orders);
}

DwBounds dw_bounds(const WignerVector& f, const SpdCovariance& c) {
  if (c.dim() != f.size()) throw std::invalid_argument("dw_bounds: dimension mismatch");
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i)
    for (int j = 0; j < f.size(); ++j)
      sum += gamma_discrepancy_sq(f.component(i).kernel, f.component(j).kernel,
                                  c.matrix()(i, j));
  DwBounds out;
  out.stein_upper = c.inverse_opnorm() * std::sqrt(sum);
  out.thm8 = std::sqrt(c.opnorm()) * c.inverse_opnorm() * m_of_f(f);
  out.lemma = c.opnorm() * std::sqrt(c.inverse_opnorm()) * out.stein_upper;
  return out;
}

double fisher_decay_bound(double t, double sigma, const SpdCovariance& c) {
  if (!(t > 0)) throw std::domain_error("fisher_decay_bound: t must be positive");
  if (sigma < 0) throw std::invalid_argument("fisher_decay_bound: sigma must be nonnegative");
  const double e = std::exp(-2.0 * t / c.opnorm());
  return e / std::sqrt(1.0 - e) * std::sqrt(c.inverse_opnorm()) * sigma;
}

double hsi_rhs(double sigma, double phi, const SpdCovariance& c) {
  if (sigma < 0 || phi < 0) throw std::invalid_argument("hsi_rhs: inputs must be nonnegative");
  if (sigma == 0.0) return 0.0;
  const double s2 = sigma * sigma;
  return 0.5 * c.opnorm() * c.inverse_opnorm() * s2 * std::log1p(phi / (c.inverse_opnorm() * s2));
}

double lsi_rhs(double phi, const SpdCovariance& c) {
  if (phi < 0) throw std::invalid_argument("lsi_rhs: phi must be nonnegative");
  return 0.5 * c.opnorm() * phi;
}

double xi_q_discrepancy(double q, int n) {
  if (n < 1) throw std::invalid_argument("xi_q_discrepancy: n must be positive");
  if (q * q * n >= 1.0) throw std::domain_error("xi_q_discrepancy: requires q^2 n < 1");
  return std::abs(q) * n / std::sqrt(1.0 - q * q * n);
}

double xi_q_hs_norm_sq(double q, int n) {
  if (n < 1) throw std::invalid_argument("xi_q_hs_norm_sq: n must be positive");
  if (q * q * n >= 1.0) throw std::domain_error("xi_q_hs_norm_sq: requires q^2 n < 1");
  return q * q * n / (1.0 - q * q * n);
}

double semicircular_entropy(int n, double rho) {
  if (n < 1) throw std::invalid_argument("semicircular_entropy: n must be positive");
  if (!(rho > 0)) throw std::invalid_argument("semicircular_entropy: rho must be positive");
  return 0.5 * n * (std::log(2.0 * std::numbers::pi_v<double>) + 1.0 - std::log(rho));
}

BoundReport bound_report(const WignerVector& f) {
  BoundReport r;
  cumulant_inputs(f, r.x, r.y, r.orders);
  r.gram = f.gram();
  const SpdCovariance c = SpdCovariance::analyze(r.gram);
  const int n = f.size();
  r.gamma_discrepancy_sq = Eigen::MatrixXd::Zero(n, n);
  r.gamma_terms.assign(n, {});
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    r.gamma_terms[i].reserve(n);
    for (int j = 0; j < n; ++j) {
      GammaExpansion e = gamma_discrepancy_expansion(f.component(i).kernel,
                                                     f.component(j).kernel, r.gram(i, j));
      r.gamma_discrepancy_sq(i, j) = e.total;
      sum += e.total;
      r.gamma_terms[i].push_back(std::move(e));
    }
  }
  r.stein_upper = c.inverse_opnorm() * std::sqrt(sum);
  r.m_of_f = psi(r.x, r.y, r.orders);
  r.dw_thm8 = std::sqrt(c.opnorm()) * c.inverse_opnorm() * r.m_of_f;
  r.dw_lemma = c.opnorm() * std::sqrt(c.inverse_opnorm()) * r.stein_upper;
  const double phi = c.inverse().trace();
  r.hsi_rhs = hsi_rhs(r.stein_upper, phi, c);
  r.lsi_rhs = lsi_rhs(phi, c);
  return r;
}

}  // namespace freeprob
