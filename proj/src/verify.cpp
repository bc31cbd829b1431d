#include "freeprob/verify.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>

#include "freeprob/breuer_major.hpp"
#include "freeprob/gue.hpp"
#include "freeprob/kernel.hpp"
#include "freeprob/ncpoly.hpp"
#include "freeprob/pairings.hpp"
#include "freeprob/rng.hpp"
#include "freeprob/spd.hpp"
#include "freeprob/stein.hpp"
#include "freeprob/wigner.hpp"

namespace freeprob {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---- shared random generators -------------------------------------------

Eigen::MatrixXd random_spd(int n, SeedStream& rng, double lo = 0.5, double hi = 2.5) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd ev(n);
  for (int i = 0; i < n; ++i) ev[i] = lo + (hi - lo) * rng.next_unit();
  return q * ev.asDiagonal() * q.transpose();
}

Kernel random_mirror_unit(int order, int grid, double h, std::uint64_t seed) {
  Kernel k = random_kernel(order, grid, h, seed, /*mirror=*/true);
  const double nrm = kernel_norm(k);
  if (nrm > 0) k *= Complex(1.0 / nrm);
  return k;
}

// ---- independent numeric helpers (oracle side) ---------------------------

// e^{M} by scaling-and-squaring Taylor; independent of the eigendecomposition
// route used in production code.
Eigen::MatrixXd matrix_exp_taylor(const Eigen::MatrixXd& m) {
  const double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (nrm / std::pow(2.0, s) > 0.5) ++s;
  Eigen::MatrixXd a = m / std::pow(2.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = (term * a) / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// composite Gauss-Legendre (8 nodes) of a matrix-valued integrand
Eigen::MatrixXd integrate_matrix(const std::function<Eigen::MatrixXd(double)>& f, double a,
                                 double b, int panels) {
  static const double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                               0.9602898564975363};
  static const double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                               0.1012285362903763};
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(f(a).rows(), f(a).cols());
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * hp;
    for (int i = 0; i < 4; ++i) {
      acc += ws[i] * (f(mid + 0.5 * hp * xs[i]) + f(mid - 0.5 * hp * xs[i]));
    }
  }
  return acc * (0.5 * hp);
}

double integrate_scalar(const std::function<double(double)>& f, double a, double b, int panels) {
  auto wrap = [&](double t) { return Eigen::MatrixXd::Constant(1, 1, f(t)); };
  return integrate_matrix(wrap, a, b, panels)(0, 0);
}

// exact quadrature against the standard semicircle density on [-2,2];
// M nodes integrate polynomials of degree <= 2M-1 exactly
double semicircle_quadrature(const std::function<double(double)>& f, int nodes) {
  double acc = 0.0;
  for (int i = 1; i <= nodes; ++i) {
    const double th = i * std::numbers::pi / (nodes + 1);
    const double x = 2.0 * std::cos(th);
    const double w = 2.0 / (nodes + 1) * std::sin(th) * std::sin(th);
    acc += w * f(x);
  }
  return acc;
}

// ---- structured rank-two chaos family (criterion 13 oracle) --------------
//
// Components F_j = sum_i lambda_i^(j) (S_i^2 - 1) over an orthonormal family,
// i.e. kernels sum_i lambda_i e_i (x) e_i. Joint moments reduce to sums over
// respecting non-crossing pairings of products of cycle traces.
struct DiagonalChaosFamily {
  std::vector<Eigen::VectorXd> lambda;  // one profile per component

  double joint_moment(std::span<const int> word) const {
    const int r = static_cast<int>(word.size());
    if (r == 0) return 1.0;
    double total = 0.0;
    std::vector<int> sizes(r, 2);
    for_each_pair_partition(r, [&](std::span<const std::pair<int, int>> pairs, int cr) {
      if (cr != 0) return;
      if (!is_respecting(pairs, sizes)) return;
      // blocks of two slots each; pairs glue blocks into cycles
      std::vector<std::array<int, 2>> link(r, {-1, -1});  // partner block via slot 0/1
      for (const auto& [a, b] : pairs) {
        const int ba = (a - 1) / 2, sa = (a - 1) % 2;
        const int bb = (b - 1) / 2, sb = (b - 1) % 2;
        link[ba][sa] = bb;
        link[bb][sb] = ba;
      }
      std::vector<bool> seen(r, false);
      double prod = 1.0;
      for (int start = 0; start < r; ++start) {
        if (seen[start]) continue;
        Eigen::VectorXd cycle = lambda[word[start] - 1];
        seen[start] = true;
        int prev = start;
        int cur = link[start][1];
        while (cur != start) {
          seen[cur] = true;
          cycle = cycle.cwiseProduct(lambda[word[cur] - 1]);
          // leave through the other slot
          const int next = link[cur][0] == prev ? link[cur][1] : link[cur][0];
          prev = cur;
          cur = next;
        }
        prod *= cycle.sum();
      }
      total += prod;
    });
    return total;
  }

  std::vector<Kernel> dense_kernels(double h) const {
    const int dim = static_cast<int>(lambda[0].size());
    std::vector<Kernel> out;
    for (const auto& lam : lambda) {
      Kernel k(2, dim, h);
      for (int i = 0; i < dim; ++i) k.data()[static_cast<Eigen::Index>(i) * dim + i] = lam[i];
      out.push_back(std::move(k));
    }
    return out;
  }
};

// ---- the checks -----------------------------------------------------------

using Adder = std::function<void(const std::string&, bool, const std::string&)>;

void check_c01_product_vs_pairing(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int r = 2 + static_cast<int>(rng.next_below(3));
    std::vector<int> orders(r);
    int total = 0;
    for (int& o : orders) {
      o = 1 + static_cast<int>(rng.next_below(3));
      total += o;
    }
    if (total % 2 == 1) {
      total += orders[0] == 3 ? -1 : 1;
      orders[0] = orders[0] == 3 ? 2 : orders[0] + 1;
    }
    const int grid = 2 + static_cast<int>(rng.next_below(2));
    const double h = 0.25 + rng.next_unit();
    std::vector<Kernel> fs;
    for (int i = 0; i < r; ++i) fs.push_back(random_kernel(orders[i], grid, h, rng.next_u64()));

    const Complex via_product = wigner_joint_moment(fs);
    Complex via_pairings = 0.0;
    for_each_pair_partition(total / 2, [&](std::span<const std::pair<int, int>> pairs, int cr) {
      if (cr != 0) return;
      if (!is_respecting(pairs, orders)) return;
      via_pairings += pairing_integral(fs, pairs);
    });
    worst = std::max(worst, std::abs(via_product - via_pairings));
  }
  add("C01-product-vs-pairing-oracle", worst <= 1e-9, "max |delta| = " + fmt(worst));
}

void check_c02_fourth_moment(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 2);
  double worst = 0.0, worst_excess = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int order = 1 + static_cast<int>(rng.next_below(3));
    const int grid = 2 + static_cast<int>(rng.next_below(2));
    Kernel f = random_mirror_unit(order, grid, 0.5 + rng.next_unit(), rng.next_u64());
    const FourthMoment fm = fourth_moment_identity(f);
    worst = std::max(worst, std::abs(fm.lhs - fm.rhs));
    const double y = norm_sq(f);
    worst_excess = std::min(worst_excess, fm.lhs - 2.0 * y * y);
  }
  const bool pass = worst <= 1e-10 && worst_excess >= -1e-12;
  add("C02-fourth-moment-identity", pass,
      "max |lhs-rhs| = " + fmt(worst) + ", min excess = " + fmt(worst_excess));
}

void check_c03_lemma8_dominance(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 3);
  int strict = 0, equal_orders = 0, mixed_orders = 0;
  bool dominated = true;
  double worst_violation = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool same = trial < 50;
    // order-1 equal pairs hit the bound with equality; keep a few of them and
    // draw the rest from orders 2..3 so strictness is observable
    const int p = same && trial < 5 ? 1 : 2 + static_cast<int>(rng.next_below(2));
    int q = same ? p : 1 + static_cast<int>(rng.next_below(3));
    if (!same && q == p) q = p == 3 ? 1 : p + 1;
    (same ? equal_orders : mixed_orders) += 1;
    const int grid = 2 + static_cast<int>(rng.next_below(2));
    const double h = 0.5 + rng.next_unit();
    Kernel f = random_mirror_unit(p, grid, h, rng.next_u64());
    Kernel g = random_mirror_unit(q, grid, h, rng.next_u64());
    const double a = 2.0 * rng.next_unit() - 1.0;
    const double lhs = gamma_discrepancy_sq(f, g, a);
    const double rhs = lemma8_rhs(f, g, a);
    if (lhs > rhs + 1e-9 * (1.0 + rhs)) {
      dominated = false;
      worst_violation = std::max(worst_violation, lhs - rhs);
    }
    if (rhs - lhs > 1e-12 * (1.0 + rhs)) ++strict;
  }
  const bool pass = dominated && strict >= 90 && equal_orders > 0 && mixed_orders > 0;
  add("C03-lemma8-dominance", pass,
      "strict in " + std::to_string(strict) + "/100, equal-order " + std::to_string(equal_orders) +
          ", mixed-order " + std::to_string(mixed_orders) +
          (dominated ? "" : ", violation " + fmt(worst_violation)));
}

void check_c04_theorem8_pipeline(const Adder& add, std::uint64_t /*seed*/) {
  // rank-one order-2 unit kernel: e (x) e with e = (sqrt 2, 0), N = 2, h = 1/2
  Eigen::VectorXcd e(2);
  e << std::sqrt(2.0), 0.0;
  std::vector<Eigen::VectorXcd> factors{e, e};
  Kernel f = rank_one(factors, 0.5);
  WignerVector single = WignerVector::from_components({{2, f}});
  const double m = m_of_f(single);
  const SpdCovariance c1 = SpdCovariance::analyze(single.gram());
  const DwBounds b1 = dw_bounds(single, c1);
  const double m_target = std::pow(2.0, 0.75);
  const bool part1 = std::abs(m - m_target) <= 1e-12 &&
                     std::abs(b1.stein_upper * b1.stein_upper - 2.0) <= 1e-10 &&
                     std::abs(b1.thm8 - m_target) <= 1e-12;

  // exact first-chaos family: orthonormal order-1 kernels
  const int d = 3, grid = 4;
  const double h = 0.25;
  std::vector<std::pair<int, Kernel>> comps;
  for (int i = 0; i < d; ++i) {
    Kernel k(1, grid, h);
    k.data()[i] = 1.0 / std::sqrt(h);
    comps.emplace_back(1, std::move(k));
  }
  WignerVector chaos1 = WignerVector::from_components(std::move(comps));
  const SpdCovariance c2 = SpdCovariance::analyze(chaos1.gram());
  const DwBounds b2 = dw_bounds(chaos1, c2);
  const double m2 = m_of_f(chaos1);
  const bool part2 = m2 == 0.0 && std::abs(b2.stein_upper) <= 1e-10;

  add("C04-theorem8-pipeline", part1 && part2,
      "M = " + fmt(m) + " (target 2^{3/4}), stein_upper^2 = " + fmt(b1.stein_upper * b1.stein_upper) +
          "; first-chaos M = " + fmt(m2) + ", stein_upper = " + fmt(b2.stein_upper));
}

void check_c05_schwinger_dyson(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(3));
    const SpdCovariance c = SpdCovariance::analyze(random_spd(n, rng));
    std::vector<NcPolynomial> p;
    for (int i = 0; i < n; ++i) {
      NcPolynomial poly(n);
      const int terms = 1 + static_cast<int>(rng.next_below(4));
      for (int t = 0; t < terms; ++t) {
        Word w(rng.next_below(6));
        for (int& v : w) v = 1 + static_cast<int>(rng.next_below(n));
        poly.add_term(w, PolyComplex(2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0));
      }
      p.push_back(std::move(poly));
    }
    worst = std::max(worst, schwinger_dyson_residual(p, c));
  }
  add("C05-schwinger-dyson", worst <= 1e-10, "max residual = " + fmt(worst));
}

void check_c06_q_engine(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 6);
  double worst0 = 0.0, worst1 = 0.0, worst_poly = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(3));
    const Eigen::MatrixXd c = random_spd(n, rng);
    const int len = 2 * (1 + static_cast<int>(rng.next_below(4)));
    std::vector<int> word(len);
    for (int& v : word) v = 1 + static_cast<int>(rng.next_below(n));
    // q = 0 reduces to the non-crossing sum
    worst0 = std::max(worst0, std::abs(q_family_moment(c, 0.0, word) - family_moment(c, word)));
    // q = 1 matches the all-pairings Wick sum
    double wick = 0.0;
    for_each_pair_partition(len / 2, [&](std::span<const std::pair<int, int>> pairs, int) {
      double prod = 1.0;
      for (const auto& [a, b] : pairs) prod *= c(word[a - 1] - 1, word[b - 1] - 1);
      wick += prod;
    });
    worst1 = std::max(worst1, std::abs(q_family_moment(c, 1.0, word) - wick));
  }
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const std::vector<int> w4(4, 1), w6(6, 1);
  for (double q : {-0.8, -0.3, 0.0, 0.4, 0.9}) {
    worst_poly = std::max(worst_poly, std::abs(q_family_moment(one, q, w4) - (2.0 + q)));
    worst_poly = std::max(
        worst_poly, std::abs(q_family_moment(one, q, w6) - (5.0 + 6.0 * q + 3.0 * q * q + q * q * q)));
  }
  const bool pass = worst0 <= 1e-12 && worst1 <= 1e-12 && worst_poly <= 1e-12;
  add("C06-q-engine-consistency", pass,
      "q=0 delta " + fmt(worst0) + ", q=1 delta " + fmt(worst1) + ", moment polynomials delta " +
          fmt(worst_poly));
}

void check_c07_xi_q(const Adder& add, std::uint64_t /*seed*/) {
  double worst = 0.0;
  const std::pair<double, int> cases[] = {{0.1, 4}, {0.2, 3}, {0.3, 2}};
  for (auto [q, n] : cases) {
    double series = 0.0;
    for (int k = 1; k <= 50; ++k) series += std::pow(q * q * n, k);
    worst = std::max(worst, std::abs(xi_q_hs_norm_sq(q, n) - series));
  }
  bool domain_ok = false;
  try {
    xi_q_discrepancy(0.5, 4);
  } catch (const std::domain_error&) {
    domain_ok = true;
  }
  double example = std::abs(xi_q_discrepancy(0.1, 4) - 0.4 / std::sqrt(0.96));
  const bool pass = worst <= 1e-10 && domain_ok && example <= 1e-12;
  add("C07-xi-q-closed-form", pass,
      "series delta " + fmt(worst) + ", domain error " + (domain_ok ? "raised" : "MISSING"));
}

void check_c08_matrix_identities(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 8);
  double worst_ou = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(4));
    const SpdCovariance c = SpdCovariance::analyze(random_spd(n, rng, 1.0, 4.0));
    for (double t : {0.1, 1.0, 10.0}) {
      auto integ = integrate_matrix(
          [&](double v) { return matrix_exp_taylor(v * c.inverse()); }, 0.0, t, 512);
      const Eigen::MatrixXd via_quadrature = matrix_exp_taylor(-t * c.inverse()) * integ;
      const Eigen::MatrixXd closed = ou_covariance(c, t);
      worst_ou = std::max(worst_ou, (via_quadrature - closed).cwiseAbs().maxCoeff());
    }
  }
  double worst_fisher = 0.0;
  for (double cval : {1.0, 2.0, 5.0}) {
    // substitution t = v^2 tames the inverse-sqrt endpoint
    auto f = [&](double v) {
      const double t = v * v;
      const double e = std::exp(-2.0 * t / cval);
      return 2.0 * v * e / std::sqrt(1.0 - e);
    };
    const double upper = std::sqrt(40.0 * cval);
    const double val = integrate_scalar(f, 0.0, upper, 4000);
    worst_fisher = std::max(worst_fisher, std::abs(val - cval));
  }
  const bool pass = worst_ou <= 1e-8 && worst_fisher <= 1e-6;
  add("C08-matrix-identities", pass,
      "OU quadrature delta " + fmt(worst_ou) + ", fisher integral delta " + fmt(worst_fisher));
}

void check_c09_hsi_lsi(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 9);
  bool ordered = true;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(4));
    const SpdCovariance c = SpdCovariance::analyze(random_spd(n, rng));
    const double sigma = 2.0 * rng.next_unit();
    const double phi = 4.0 * rng.next_unit();
    if (hsi_rhs(sigma, phi, c) > lsi_rhs(phi, c) * (1.0 + 1e-12) + 1e-15) ordered = false;
  }
  // equality in the small-Fisher limit
  const SpdCovariance c = SpdCovariance::analyze(random_spd(3, rng));
  const double sigma = 1.3;
  const double phi = 1e-8 * c.inverse_opnorm() * sigma * sigma;
  worst_ratio = std::abs(hsi_rhs(sigma, phi, c) / lsi_rhs(phi, c) - 1.0);
  const bool pass = ordered && worst_ratio <= 1e-6;
  add("C09-hsi-below-lsi", pass,
      std::string(ordered ? "ordered on grid" : "ORDER VIOLATION") + ", limit ratio delta " +
          fmt(worst_ratio));
}

void check_c10_breuer_major(const Adder& add, std::uint64_t /*seed*/) {
  std::vector<long long> ns;
  for (long long n = 32; n <= 2048; n *= 2) ns.push_back(n);

  // exact closed form at H = 1/2, q = 2
  BmConfig cfg{0.5, 2, 0, {0.0, 1.0}, 1e-10};
  BmRateResult exact = bm_rate_experiment(cfg, ns);
  double worst_exact = 0.0;
  for (std::size_t i = 1; i < exact.points.size(); ++i)
    worst_exact = std::max(worst_exact, std::abs(exact.points[i].slope + 0.25));
  const bool pass_a = worst_exact <= 1e-12;

  auto m_decreasing = [](const BmRateResult& r) {
    for (std::size_t i = 1; i < r.points.size(); ++i)
      if (!(r.points[i].m < r.points[i - 1].m)) return false;
    return true;
  };

  std::vector<long long> ns10(ns.begin(), ns.end() - 1);  // up to 2^10
  BmConfig cfg_b{0.3, 3, 0, {0.0, 1.0}, 1e-10};
  BmRateResult rough = bm_rate_experiment(cfg_b, ns10);
  const bool pass_b = std::abs(rough.aitken_slope - (-0.25)) <= 0.10 && m_decreasing(rough);

  BmConfig cfg_c{0.6, 3, 0, {0.0, 1.0}, 1e-10};
  BmRateResult mid = bm_rate_experiment(cfg_c, ns);
  const bool pass_c = std::abs(mid.aitken_slope - (-0.20)) <= 0.10 && m_decreasing(mid);

  add("C10-breuer-major-rates", pass_a && pass_b && pass_c,
      "H=1/2 slope delta " + fmt(worst_exact) + "; H=0.3 aitken " + fmt(rough.aitken_slope) +
          "; H=0.6 aitken " + fmt(mid.aitken_slope) + "; M nonincreasing in every case");

  // soft third regime: monotone decrease plus extrapolated slope near -0.05
  BmConfig cfg_d{0.8, 3, 0, {0.0, 1.0}, 1e-6};
  BmRateResult slow = bm_rate_experiment(cfg_d, ns);
  bool monotone = true;
  for (std::size_t i = 1; i < slow.points.size(); ++i)
    if (!(slow.points[i].m < slow.points[i - 1].m)) monotone = false;
  const bool pass_d = monotone && std::abs(slow.aitken_slope - (-0.05)) <= 0.05;
  add("C10soft-breuer-major-slow-regime", pass_d,
      std::string(monotone ? "monotone" : "NOT MONOTONE") + ", aitken " + fmt(slow.aitken_slope) +
          " (target -0.05 +- 0.05)");
}

void check_c11_gue(const Adder& add, std::uint64_t seed) {
  const int n = 1024, reps = 20;
  SeedStream rng = SeedStream::derive(seed, 11);
  const std::uint64_t mc_seed = rng.next_u64();

  double mean4 = 0.0;
  for (int r = 0; r < reps; ++r) {
    Eigen::MatrixXcd h = sample_gue(n, SeedStream::derive(mc_seed, 7000 + r).next_u64());
    Eigen::MatrixXcd h2 = h * h;
    mean4 += h2.cwiseAbs2().sum() / n;  // tr(H^4) = ||H^2||_F^2
  }
  mean4 /= reps;
  const bool pass_single = std::abs(mean4 - 2.0) <= 0.05;

  Eigen::MatrixXd c(2, 2);
  c << 2.0, 1.0, 1.0, 2.0;
  const SpdCovariance spd = SpdCovariance::analyze(c);
  const std::vector<std::vector<int>> words = {{1, 2}, {1, 2, 1}, {1, 2, 1, 2}, {1, 1, 2, 2}};
  McReport rep = mc_compare(spd, words, n, reps, mc_seed);

  std::string detail = "tau(H^4) = " + fmt(mean4);
  for (const auto& w : rep.words)
    detail += "; |d|/pred " + fmt(std::abs(w.estimate - w.prediction)) + "/" + fmt(w.prediction);
  add("C11-gue-monte-carlo", pass_single && rep.all_pass, detail);
}

void check_c12_haagerup(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 12);
  bool all = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int order = 1 + static_cast<int>(rng.next_below(3));
    const int grid = 2 + static_cast<int>(rng.next_below(2));
    Kernel f = random_kernel(order, grid, 0.5 + rng.next_unit(), rng.next_u64());
    if (!haagerup_check(f)) all = false;
  }

  // the extremal rank-one kernel: I_2(e (x) e) = S^2 - 1, operator norm 3,
  // exactly (n+1)||f||_2. The moment estimator is validated against the exact
  // spectral quadrature at the in-cap power, then pushed to high power where
  // the 2% tightness shows.
  Eigen::VectorXcd e(2);
  e << std::sqrt(2.0), 0.0;
  std::vector<Eigen::VectorXcd> factors{e, e};
  Kernel f = rank_one(factors, 0.5);
  auto spectral_estimate = [&](int m) {
    // normalize by the spectral radius so high powers stay inside double range
    const double mom = semicircle_quadrature(
        [&](double x) { return std::pow(std::abs(x * x - 1.0) / 3.0, 2 * m); }, 2 * m + 1);
    return 3.0 * std::pow(mom, 1.0 / (2.0 * m));
  };
  const double production_m4 = opnorm_estimate(f, 4);
  const double spectral_m4 = spectral_estimate(4);
  const double spectral_big = spectral_estimate(512);
  const double bound = 3.0 * kernel_norm(f);
  const bool match = std::abs(production_m4 - spectral_m4) <= 1e-10;
  const bool tight = std::abs(spectral_big - bound) <= 0.02 * bound && spectral_big <= bound * (1 + 1e-9);
  add("C12-haagerup", all && match && tight,
      std::string(all ? "50/50 bounded" : "BOUND VIOLATION") + ", estimator vs quadrature delta " +
          fmt(std::abs(production_m4 - spectral_m4)) + ", high-power estimate " + fmt(spectral_big) +
          " vs bound " + fmt(bound));
}

void check_c13_nps_equivalence(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 13);
  const double rho = 0.5;

  auto build = [&](int k) {
    DiagonalChaosFamily fam;
    Eigen::VectorXd l1 = Eigen::VectorXd::Zero(2 * k), l2 = Eigen::VectorXd::Zero(2 * k);
    for (int i = 0; i < k; ++i) {
      const double s1 = rng.next_below(2) ? 1.0 : -1.0;
      const double s2 = rng.next_below(2) ? 1.0 : -1.0;
      l1[i] = s1 / std::sqrt(static_cast<double>(k));
      l2[i] = rho * l1[i];
      l2[k + i] = std::sqrt(1.0 - rho * rho) * s2 / std::sqrt(static_cast<double>(k));
    }
    fam.lambda = {l1, l2};
    return fam;
  };

  std::vector<std::vector<int>> words;
  for (int len = 1; len <= 6; ++len) {
    std::vector<int> w(len, 1);
    while (true) {
      words.push_back(w);
      int i = len - 1;
      while (i >= 0 && w[i] == 2) w[i--] = 1;
      if (i < 0) break;
      ++w[i];
    }
  }

  Eigen::MatrixXd target(2, 2);
  target << 1.0, rho, rho, 1.0;

  // structured evaluator cross-checked against the dense product engine
  DiagonalChaosFamily small = build(4);
  auto dense = small.dense_kernels(1.0);
  double validation = 0.0;
  for (const auto& w : words) {
    std::vector<Kernel> fs;
    for (int idx : w) fs.push_back(dense[idx - 1]);
    validation = std::max(validation,
                          std::abs(small.joint_moment(w) - std::real(wigner_joint_moment(fs))));
  }

  double prev_m = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double final_err = 0.0, final_x = 0.0;
  for (int k : {4, 16, 64, 256, 1024}) {
    DiagonalChaosFamily fam = build(k);
    double err = 0.0;
    for (const auto& w : words)
      err = std::max(err, std::abs(fam.joint_moment(w) - family_moment(target, w)));
    std::vector<double> xs, ys;
    for (const auto& lam : fam.lambda) {
      xs.push_back(lam.array().pow(4).sum());  // ||f (1) f||^2 for diagonal kernels
      ys.push_back(lam.squaredNorm());
    }
    const std::vector<int> orders(2, 2);
    const double m = psi(xs, ys, orders);
    if (!(m < prev_m)) monotone = false;
    prev_m = m;
    final_err = err;
    final_x = *std::max_element(xs.begin(), xs.end());
  }
  const bool pass = validation <= 1e-9 && monotone && final_err <= 1e-2;
  add("C13-nps-multivariate-equivalence", pass,
      "dense validation delta " + fmt(validation) + ", final joint-moment error " + fmt(final_err) +
          ", final max fourth cumulant " + fmt(final_x) + (monotone ? ", M monotone" : ", M NOT MONOTONE"));
}

// ---- invariant sweeps ------------------------------------------------------

void check_inv_pairing_counts(const Adder& add, std::uint64_t /*seed*/) {
  bool pass = true;
  std::string detail;
  for (int m = 0; m <= 6; ++m) {
    long long ncross = 0, all = 0;
    double qsum0 = 0.0;
    for_each_pair_partition(m, [&](std::span<const std::pair<int, int>>, int cr) {
      ++all;
      if (cr == 0) ++ncross;
      qsum0 += cr == 0 ? 1.0 : 0.0;
    });
    long long dfact = 1;
    for (int i = 3; i <= 2 * m - 1; i += 2) dfact *= i;
    if (m == 0) dfact = 1;
    if (ncross != static_cast<long long>(catalan(m)) || all != dfact) pass = false;
  }
  add("INV-pairing-counts", pass, "noncrossing = catalan, total = (2m-1)!! for m <= 6");
}

void check_inv_cumulant_roundtrip(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 101);
  // relative to the intermediate magnitudes: the recursion amplifies inputs by
  // the partition counts before cancelling them back
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_below(8));
    std::vector<double> m(k);
    for (double& v : m) v = 2.0 * rng.next_unit() - 1.0;
    auto kappa = moments_to_free_cumulants(m);
    auto back = free_cumulants_to_moments(kappa);
    double scale = 1.0;
    for (double v : kappa) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(back[i] - m[i]) / scale);
    // and the reverse composition on random cumulants
    auto back2 = moments_to_free_cumulants(free_cumulants_to_moments(m));
    for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(back2[i] - m[i]));
  }
  add("INV-cumulant-roundtrip", worst <= 1e-12, "max relative |delta| = " + fmt(worst));
}

void check_inv_crossing_reflection(const Adder& add, std::uint64_t /*seed*/) {
  bool pass = true;
  for (int m = 1; m <= 5; ++m) {
    const int n = 2 * m;
    for (const auto& p : enumerate_pair_partitions(m)) {
      std::vector<std::pair<int, int>> reflected;
      for (auto [a, b] : p.pairs) reflected.emplace_back(n + 1 - b, n + 1 - a);
      if (crossing_number(make_pair_partition(reflected)) != crossing_number(p)) pass = false;
    }
  }
  add("INV-crossing-reflection", pass, "crossings invariant under i -> 2m+1-i, m <= 5");
}

void check_inv_flip_multiply(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 102);
  bool pass = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(3));
    NcPolynomial p(n);
    for (int t = 0; t < 4; ++t) {
      Word w(rng.next_below(6));
      for (int& v : w) v = 1 + static_cast<int>(rng.next_below(n));
      p.add_term(w, PolyComplex(rng.next_unit(), rng.next_unit()));
    }
    for (int j = 1; j <= n; ++j) {
      NcPolynomial direct = cyclic_derivative(p, j);
      NcPolynomial via = multiply_flip(difference_quotient(p, j));
      NcPolynomial diff = direct - via;
      if (!diff.is_zero()) pass = false;
    }
  }
  add("INV-flip-multiply", pass, "D_j = m o flip o d_j symbolically on random polynomials");
}

void check_inv_kernel_identities(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 103);
  double worst_adj = 0.0, worst_cs = 0.0, worst_pairing = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(3));
    const int m = 1 + static_cast<int>(rng.next_below(3));
    const int grid = 2 + static_cast<int>(rng.next_below(2));
    const double h = 0.5 + rng.next_unit();
    Kernel f = random_kernel(n, grid, h, rng.next_u64());
    Kernel g = random_kernel(m, grid, h, rng.next_u64());
    for (int p = 0; p <= std::min(n, m); ++p) {
      Kernel lhs = adjoint(contract(f, g, p));
      Kernel rhs = contract(adjoint(g), adjoint(f), p);
      worst_adj = std::max(worst_adj, (lhs.data() - rhs.data()).cwiseAbs().maxCoeff());
    }
    if (f.same_shape(g)) {
      const double cs = std::norm(inner(f, g)) - norm_sq(f) * norm_sq(g);
      worst_cs = std::max(worst_cs, cs);
    }
    // pairing integral bounded by the product of norms
    const int total = n + m;
    if (total % 2 == 0) {
      const Kernel fs[2] = {f, g};
      double bound = kernel_norm(f) * kernel_norm(g);
      for_each_pair_partition(total / 2, [&](std::span<const std::pair<int, int>> pairs, int) {
        const double v = std::abs(pairing_integral(fs, pairs));
        worst_pairing = std::max(worst_pairing, v - bound * (1.0 + 1e-12));
      });
    }
  }
  const bool pass = worst_adj <= 1e-12 && worst_cs <= 1e-12 && worst_pairing <= 1e-9;
  add("INV-kernel-identities", pass,
      "adjoint-contraction delta " + fmt(worst_adj) + ", cauchy-schwarz excess " + fmt(worst_cs) +
          ", pairing bound excess " + fmt(worst_pairing));
}

void check_inv_orthogonality_poincare(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 104);
  double worst_orth = 0.0;
  bool poincare = true;
  for (int trial = 0; trial < 30; ++trial) {
    const int grid = 2 + static_cast<int>(rng.next_below(2));
    const double h = 0.5 + rng.next_unit();
    const int n = 1 + static_cast<int>(rng.next_below(3));
    int m = 1 + static_cast<int>(rng.next_below(3));
    if (m == n) m = n == 3 ? 1 : n + 1;
    if ((n + m) % 2 == 0) {
      Kernel f = random_kernel(n, grid, h, rng.next_u64());
      Kernel g = random_kernel(m, grid, h, rng.next_u64());
      const Kernel w[2] = {f, g};
      worst_orth = std::max(worst_orth, std::abs(wigner_joint_moment(w)));
    }
    Kernel f = random_kernel(n, grid, h, rng.next_u64());
    if (norm_sq(f) > grad_norm_sq(n, f) + 1e-12) poincare = false;
  }
  add("INV-orthogonality-poincare", worst_orth <= 1e-10 && poincare,
      "cross-order moment max " + fmt(worst_orth) + (poincare ? ", poincare holds" : ", POINCARE FAILS"));
}

void check_inv_ou_psd(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 105);
  bool pass = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(3));
    const SpdCovariance c = SpdCovariance::analyze(random_spd(n, rng));
    double prev_trace = -1.0;
    for (double t : {0.0, 0.3, 1.0, 3.0, 30.0}) {
      const Eigen::MatrixXd v = ou_covariance(c, t);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
      if (es.eigenvalues().minCoeff() < -1e-12) pass = false;
      if (v.trace() < prev_trace - 1e-12) pass = false;
      prev_trace = v.trace();
    }
    if ((ou_covariance(c, 0.0)).cwiseAbs().maxCoeff() > 1e-14) pass = false;
    if ((ou_covariance(c, 300.0) - c.matrix()).cwiseAbs().maxCoeff() > 1e-10) pass = false;
  }
  add("INV-ou-psd-increasing", pass, "OU covariance PSD, increasing, 0 at t=0, C at t=inf");
}

void check_inv_psi_scaling(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 106);
  double worst = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(3));
    std::vector<double> x(n), y(n);
    std::vector<int> orders(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.next_unit();
      y[i] = 0.2 + rng.next_unit();
      orders[i] = 1 + static_cast<int>(rng.next_below(4));
    }
    const double base = psi(x, y, orders);
    const double lam = 0.3 + rng.next_unit();
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = lam * lam * lam * lam * x[i];
      ys[i] = lam * lam * y[i];
    }
    worst = std::max(worst, std::abs(psi(xs, ys, orders) - lam * lam * base));
    std::vector<double> xup = x;
    for (double& v : xup) v *= 1.7;
    if (psi(xup, y, orders) + 1e-12 < base) monotone = false;
  }
  add("INV-psi-scaling", worst <= 1e-10 && monotone,
      "homogeneity delta " + fmt(worst) + (monotone ? ", monotone in x" : ", NOT MONOTONE"));
}

void check_inv_stein_upper(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 107);
  // the aggregated discrepancy is nonnegative, vanishes on an exact
  // first-chaos family and is strictly positive once a component carries a
  // fourth cumulant
  bool pass = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int grid = 3;
    const double h = 0.5 + rng.next_unit();
    Kernel e1(1, grid, h), e2(1, grid, h);
    e1.data()[0] = 1.0 / std::sqrt(h);
    e2.data()[1] = 1.0 / std::sqrt(h);
    WignerVector exact = WignerVector::from_components({{1, e1}, {1, e2}});
    const DwBounds clean = dw_bounds(exact, SpdCovariance::analyze(exact.gram()));
    if (std::abs(clean.stein_upper) > 1e-10) pass = false;

    Kernel f = random_mirror_unit(2, grid, h, rng.next_u64());
    WignerVector mixed = WignerVector::from_components({{1, e1}, {2, f}});
    const DwBounds dirty = dw_bounds(mixed, SpdCovariance::analyze(mixed.gram()));
    const double x = fourth_moment_identity(f).excess;
    if (dirty.stein_upper < 0 || (x > 1e-6 && dirty.stein_upper <= 0)) pass = false;
  }
  add("INV-stein-upper-vanishing", pass,
      "zero on exact first-chaos families, positive with a live fourth cumulant");
}

void check_inv_gamma_operator_expansion(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 110);
  // integration by parts pins the constant chaos coefficient of the
  // Gamma-matrix entry at tau(F G)
  double worst_const = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int grid = 2 + static_cast<int>(rng.next_below(2));
    const double h = 0.5 + rng.next_unit();
    Kernel f = random_mirror_unit(p, grid, h, rng.next_u64());
    Kernel g = random_mirror_unit(p, grid, h, rng.next_u64());
    const GammaExpansion e = gamma_discrepancy_expansion(f, g, 0.0);
    worst_const = std::max(worst_const, std::abs(e.constant - inner(g, f)));
  }
  // diagonal second-chaos pairs: Gamma = sum l1_i l2_i (S_i^2 x 1 + S_i x S_i)
  // by direct operator algebra, so the squared distance to a * 1 x 1 is
  // (sum l1 l2 - a)^2 + 2 sum (l1 l2)^2
  double worst_total = 0.0;
  for (int trial = 0; trial < 15; ++trial) {
    const int k = 3 + static_cast<int>(rng.next_below(3));
    Kernel f1(2, k, 1.0), f2(2, k, 1.0);
    double dot = 0.0, dot_sq = 0.0;
    for (int i = 0; i < k; ++i) {
      const double l1 = 2.0 * rng.next_unit() - 1.0;
      const double l2 = 2.0 * rng.next_unit() - 1.0;
      f1.data()[static_cast<Eigen::Index>(i) * k + i] = l1;
      f2.data()[static_cast<Eigen::Index>(i) * k + i] = l2;
      dot += l1 * l2;
      dot_sq += l1 * l2 * l1 * l2;
    }
    const double a = 2.0 * rng.next_unit() - 1.0;
    const double expect = (dot - a) * (dot - a) + 2.0 * dot_sq;
    worst_total = std::max(worst_total, std::abs(gamma_discrepancy_sq(f1, f2, a) - expect));
  }
  const bool pass = worst_const <= 1e-10 && worst_total <= 1e-10;
  add("INV-gamma-operator-expansion", pass,
      "constant vs tau(FG) delta " + fmt(worst_const) + ", diagonal-family closed form delta " +
          fmt(worst_total));
}

void check_inv_potential_gradient(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 108);
  bool pass = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(4));
    const SpdCovariance c = SpdCovariance::analyze(random_spd(n, rng));
    const NcPolynomial vc = quadratic_potential(c);
    for (int j = 1; j <= n; ++j) {
      NcPolynomial grad = cyclic_derivative(vc, j);
      NcPolynomial expected(n);
      for (int l = 1; l <= n; ++l) expected.add_term({l}, c.inverse()(j - 1, l - 1));
      NcPolynomial diff = grad - expected;
      double worst = 0.0;
      for (const auto& [w, coef] : diff.terms()) worst = std::max(worst, std::abs(coef));
      if (worst > 1e-12) pass = false;
    }
  }
  add("INV-potential-gradient", pass, "cyclic gradient of the quadratic potential is C^{-1} T");
}

void check_inv_chebyshev(const Adder& add, std::uint64_t /*seed*/) {
  double worst = 0.0;
  for (int p = 0; p <= 6; ++p)
    for (int q = 0; q <= 6; ++q) {
      const auto up = chebyshev_u(p);
      const auto uq = chebyshev_u(q);
      double val = 0.0;
      for (std::size_t i = 0; i < up.size(); ++i)
        for (std::size_t j = 0; j < uq.size(); ++j)
          val += up[i] * uq[j] * semicircle_moment(static_cast<int>(i + j), 1.0);
      worst = std::max(worst, std::abs(val - (p == q ? 1.0 : 0.0)));
    }
  add("INV-chebyshev-orthonormal", worst <= 1e-10, "max |<U_p,U_q> - delta| = " + fmt(worst));
}

void check_inv_fisher_monotone(const Adder& add, std::uint64_t seed) {
  SeedStream rng = SeedStream::derive(seed, 109);
  bool pass = true;
  const SpdCovariance c = SpdCovariance::analyze(random_spd(3, rng));
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 0.05; t < 5.0; t += 0.05) {
    const double v = fisher_decay_bound(t, 1.0, c);
    if (v > prev + 1e-12) pass = false;
    prev = v;
  }
  if (fisher_decay_bound(1.0, 0.0, c) != 0.0) pass = false;
  add("INV-fisher-decay-monotone", pass, "bound decreasing in t, zero at sigma = 0");
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const VerifyOptions& options) {
  std::vector<CheckResult> results;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  };
  auto wanted = [&](const std::string& name) {
    if (options.only.empty()) return true;
    for (const auto& p : options.only)
      if (name.rfind(p, 0) == 0) return true;
    return false;
  };
  auto run = [&](const char* name, void (*fn)(const Adder&, std::uint64_t)) {
    if (!wanted(name)) return;
    try {
      fn(add, options.seed);
    } catch (const std::exception& e) {
      add(name, false, std::string("exception: ") + e.what());
    }
  };

  run("C01-product-vs-pairing-oracle", check_c01_product_vs_pairing);
  run("C02-fourth-moment-identity", check_c02_fourth_moment);
  run("C03-lemma8-dominance", check_c03_lemma8_dominance);
  run("C04-theorem8-pipeline", check_c04_theorem8_pipeline);
  run("C05-schwinger-dyson", check_c05_schwinger_dyson);
  run("C06-q-engine-consistency", check_c06_q_engine);
  run("C07-xi-q-closed-form", check_c07_xi_q);
  run("C08-matrix-identities", check_c08_matrix_identities);
  run("C09-hsi-below-lsi", check_c09_hsi_lsi);
  run("C10-breuer-major-rates", check_c10_breuer_major);
  run("C11-gue-monte-carlo", check_c11_gue);
  run("C12-haagerup", check_c12_haagerup);
  run("C13-nps-multivariate-equivalence", check_c13_nps_equivalence);
  run("INV-pairing-counts", check_inv_pairing_counts);
  run("INV-cumulant-roundtrip", check_inv_cumulant_roundtrip);
  run("INV-crossing-reflection", check_inv_crossing_reflection);
  run("INV-flip-multiply", check_inv_flip_multiply);
  run("INV-kernel-identities", check_inv_kernel_identities);
  run("INV-orthogonality-poincare", check_inv_orthogonality_poincare);
  run("INV-ou-psd-increasing", check_inv_ou_psd);
  run("INV-psi-scaling", check_inv_psi_scaling);
  run("INV-stein-upper-vanishing", check_inv_stein_upper);
  run("INV-gamma-operator-expansion", check_inv_gamma_operator_expansion);
  run("INV-potential-gradient", check_inv_potential_gradient);
  run("INV-chebyshev-orthonormal", check_inv_chebyshev);
  run("INV-fisher-decay-monotone", check_inv_fisher_monotone);
  return results;
}

}  // namespace freeprob
