#include "freeprob/breuer_major.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "freeprob/spd.hpp"
#include "freeprob/stein.hpp"

namespace freeprob {

namespace {

void check_hurst(double hurst) {
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::invalid_argument("Hurst index must lie in (0,1)");
}

void check_hypothesis(int rank, double hurst) {
  if (rank < 2) throw std::invalid_argument("functional rank must be >= 2");
  check_hurst(hurst);
  if (!(hurst < 1.0 - 1.0 / (2.0 * rank)))
    throw std::invalid_argument("requires H < 1 - 1/(2q); the series may diverge");
}

double ipow(double v, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= v;
  return r;
}

// rho values over a contiguous block, indexed by |k-l| < len
std::vector<double> rho_table(double hurst, long long len) {
  std::vector<double> t(static_cast<std::size_t>(len));
  for (long long r = 0; r < len; ++r) t[static_cast<std::size_t>(r)] = rho_h(r, hurst);
  return t;
}

// sum over (k,l) in block^2 of g(|k-l|), via the difference-count reduction
double stationary_block_sum(long long len, const std::vector<double>& g) {
  double total = static_cast<double>(len) * g[0];
  for (long long d = 1; d < len; ++d)
    total += 2.0 * static_cast<double>(len - d) * g[static_cast<std::size_t>(d)];
  return total;
}

struct Block {
  long long lo, hi;  // [lo, hi)
  long long len() const { return hi - lo; }
};

std::vector<Block> make_blocks(const BmConfig& cfg) {
  if (cfg.times.size() < 2 || cfg.times.front() != 0.0)
    throw std::invalid_argument("times must start at 0 and contain at least one increment");
  for (std::size_t i = 1; i < cfg.times.size(); ++i)
    if (!(cfg.times[i] > cfg.times[i - 1]))
      throw std::invalid_argument("times must be strictly increasing");
  if (cfg.n < 1) throw std::invalid_argument("sample count must be positive");
  std::vector<Block> blocks;
  for (std::size_t i = 1; i < cfg.times.size(); ++i) {
    Block b{static_cast<long long>(std::floor(cfg.n * cfg.times[i - 1])),
            static_cast<long long>(std::floor(cfg.n * cfg.times[i]))};
    if (b.len() <= 0)
      throw std::invalid_argument("degenerate time block; increase n or spread the times");
    blocks.push_back(b);
  }
  return blocks;
}

}  // namespace

double rho_h(long long r, double hurst) {
  check_hurst(hurst);
  const double x = static_cast<double>(std::llabs(r));
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(x + 1.0, e) + std::pow(std::abs(x - 1.0), e) - 2.0 * std::pow(x, e));
}

std::vector<double> chebyshev_u(int q) {
  if (q < 0 || q > 12) throw std::invalid_argument("chebyshev_u supported for 0 <= q <= 12");
  std::vector<double> prev{1.0};  // U_0
  if (q == 0) return prev;
  std::vector<double> cur{0.0, 1.0};  // U_1
  for (int n = 1; n < q; ++n) {
    std::vector<double> next(n + 2, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];  // x * U_n
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];    // - U_{n-1}
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double sigma_sq(int q, double hurst, double tail_tol) {
  check_hypothesis(q, hurst);
  if (!(tail_tol > 0)) throw std::invalid_argument("tail tolerance must be positive");

  // rho(r) ~ H(2H-1) r^{2H-2}; the tail of sum rho^q is ~ A R^{s+1}/(|s|-1)
  const double s = q * (2.0 * hurst - 2.0);  // summand decay exponent, < -1
  const double amp = ipow(std::abs(hurst * (2.0 * hurst - 1.0)), q);
  auto tail_bound = [&](double r) { return amp * std::pow(r, s + 1.0) / (-s - 1.0); };

  double total = 1.0;  // rho(0)^q = 1
  const long long cap = 2'000'000;
  long long r = 1;
  for (; r <= cap; ++r) {
    total += 2.0 * ipow(rho_h(r, hurst), q);
    if (hurst == 0.5) break;  // increments uncorrelated, single term
    if (r >= 8 && tail_bound(static_cast<double>(r)) < tail_tol) break;
  }
  if (r > cap) {
    // power-law extrapolation of the remaining tail from two dyadic partial sums:
    // T(R) ~ T(2R) + (S(2R)-S(R)) with T(2R) = 2^{s+1} T(R)
    double inc = 0.0;
    for (long long k = cap + 1; k <= 2 * cap; ++k) inc += 2.0 * ipow(rho_h(k, hurst), q);
    const double ratio = std::pow(2.0, s + 1.0);
    total += inc + inc * ratio / (1.0 - ratio);
  }
  return total;
}

double bm_contraction_norm_sq(long long n, int rank, double hurst, int r, long long block_lo,
                              long long block_hi, double sigma_sq_value, double dt) {
  check_hypothesis(rank, hurst);
  if (r < 1 || r > rank - 1) throw std::invalid_argument("contraction order must lie in 1..q-1");
  if (block_hi <= block_lo) throw std::invalid_argument("empty block");
  if (!(sigma_sq_value > 0) || !(dt > 0)) throw std::invalid_argument("bad normalization");
  const long long len = block_hi - block_lo;
  if (len > (1LL << 11))
    throw std::length_error("exact contraction norms capped at block length 2^11");

  const auto rho = rho_table(hurst, len);
  Eigen::MatrixXd w(len, len), p(len, len);
  for (long long i = 0; i < len; ++i)
    for (long long j = 0; j <= i; ++j) {
      const double rv = rho[static_cast<std::size_t>(i - j)];
      w(i, j) = w(j, i) = ipow(rv, r);
      p(i, j) = p(j, i) = ipow(rv, rank - r);
    }
  Eigen::MatrixXd wp = w * p;
  const double trace_sq = wp.cwiseProduct(wp.transpose()).sum();  // Tr((WP)^2)
  const double c2 = 1.0 / (sigma_sq_value * static_cast<double>(n) * dt);
  return c2 * c2 * trace_sq;
}

namespace {

// stationary value of one truncation level: rows of the Toeplitz product seen
// through a window of the given radius
double truncated_trace(const std::vector<double>& w, const std::vector<double>& p, long long m,
                       long long radius) {
  const long long two_r = 2 * radius;
  auto at = [](const std::vector<double>& t, long long d) {
    const long long a = std::llabs(d);
    return a < static_cast<long long>(t.size()) ? t[static_cast<std::size_t>(a)] : 0.0;
  };
  double total = 0.0;
  for (long long d = -two_r; d <= two_r; ++d) {
    double s = 0.0;
    for (long long k = -radius; k <= radius; ++k) s += at(w, k) * at(p, d - k);
    const long long count = m - std::llabs(d);
    if (count > 0) total += static_cast<double>(count) * s * s;
  }
  return total;
}

}  // namespace

double bm_contraction_norm_sq_approx(long long n, int rank, double hurst, int r,
                                     long long block_lo, long long block_hi,
                                     double sigma_sq_value, double dt, long long radius,
                                     double* error_estimate) {
  check_hypothesis(rank, hurst);
  if (r < 1 || r > rank - 1) throw std::invalid_argument("contraction order must lie in 1..q-1");
  if (block_hi <= block_lo) throw std::invalid_argument("empty block");
  if (!(sigma_sq_value > 0) || !(dt > 0)) throw std::invalid_argument("bad normalization");
  const long long m = block_hi - block_lo;
  radius = std::min(radius, (m - 1) / 2);
  if (radius < 1) throw std::invalid_argument("approximate mode needs a block of length >= 4");

  std::vector<double> w(static_cast<std::size_t>(radius + 1));
  std::vector<double> p(static_cast<std::size_t>(3 * radius + 1));
  for (long long k = 0; k < static_cast<long long>(p.size()); ++k) {
    const double rv = rho_h(k, hurst);
    if (k < static_cast<long long>(w.size())) w[static_cast<std::size_t>(k)] = ipow(rv, r);
    p[static_cast<std::size_t>(k)] = ipow(rv, rank - r);
  }
  const double full = truncated_trace(w, p, m, radius);
  const double half = truncated_trace(w, p, m, radius / 2 > 0 ? radius / 2 : 1);
  const double c2 = 1.0 / (sigma_sq_value * static_cast<double>(n) * dt);
  if (error_estimate) *error_estimate = c2 * c2 * std::abs(full - half);
  return c2 * c2 * full;
}

BmReport bm_vector_report(const BmConfig& cfg) {
  check_hypothesis(cfg.rank, cfg.hurst);
  const auto blocks = make_blocks(cfg);
  const int d = static_cast<int>(blocks.size());
  const double s2 = sigma_sq(cfg.rank, cfg.hurst, cfg.tail_tol);

  BmReport rep;
  rep.x.assign(d, 0.0);
  rep.x_error.assign(d, 0.0);
  rep.y.assign(d, 0.0);
  rep.gram = Eigen::MatrixXd::Zero(d, d);

  long long max_len = 0;
  for (const auto& b : blocks) max_len = std::max(max_len, b.len());
  long long span = 0;
  for (const auto& b : blocks) span = std::max(span, b.hi);
  const auto rho = rho_table(cfg.hurst, span);

  std::vector<double> c2(d);
  for (int i = 0; i < d; ++i) {
    const double dt = cfg.times[i + 1] - cfg.times[i];
    c2[i] = 1.0 / (s2 * static_cast<double>(cfg.n) * dt);
    // fourth cumulant from the contraction norms; exact up to the block cap,
    // truncated-range approximation with a reported error estimate beyond it
    const bool exact = blocks[i].len() <= (1LL << 11);
    for (int r = 1; r <= cfg.rank - 1; ++r) {
      if (exact) {
        rep.x[i] += bm_contraction_norm_sq(cfg.n, cfg.rank, cfg.hurst, r, blocks[i].lo,
                                           blocks[i].hi, s2, dt);
      } else {
        double err = 0.0;
        rep.x[i] += bm_contraction_norm_sq_approx(cfg.n, cfg.rank, cfg.hurst, r, blocks[i].lo,
                                                  blocks[i].hi, s2, dt, 1LL << 11, &err);
        rep.x_error[i] += err;
      }
    }
    // variance: stationary double sum of rho^q over the block
    std::vector<double> rq(static_cast<std::size_t>(blocks[i].len()));
    for (std::size_t k = 0; k < rq.size(); ++k) rq[k] = ipow(rho[k], cfg.rank);
    rep.y[i] = c2[i] * stationary_block_sum(blocks[i].len(), rq);
  }

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) {
        rep.gram(i, i) = rep.y[i];
        continue;
      }
      // difference-count reduction over k in block i, l in block j
      double sum = 0.0;
      for (long long diff = blocks[i].lo - blocks[j].hi + 1; diff <= blocks[i].hi - blocks[j].lo - 1;
           ++diff) {
        const long long count = std::min(blocks[i].hi, blocks[j].hi + diff) -
                                std::max(blocks[i].lo, blocks[j].lo + diff);
        if (count > 0)
          sum += static_cast<double>(count) *
                 ipow(rho[static_cast<std::size_t>(std::llabs(diff))], cfg.rank);
      }
      rep.gram(i, j) = std::sqrt(c2[i] * c2[j]) * sum;
    }

  std::vector<int> orders(d, cfg.rank);
  rep.m = psi(rep.x, rep.y, orders);
  const SpdCovariance c = SpdCovariance::analyze(rep.gram);
  rep.dw_thm8 = std::sqrt(c.opnorm()) * c.inverse_opnorm() * rep.m;
  return rep;
}

double theoretical_rate(int rank, double hurst) {
  check_hypothesis(rank, hurst);
  if (hurst <= 0.5) return -0.25;
  const double mid = (2.0 * rank - 3.0) / (2.0 * rank - 2.0);
  if (hurst <= mid) return (hurst - 1.0) / 2.0;
  return (2.0 * rank * hurst - 2.0 * rank + 1.0) / 4.0;
}

BmRateResult bm_rate_experiment(const BmConfig& base, std::span<const long long> n_list) {
  if (n_list.empty()) throw std::invalid_argument("empty n list");
  BmRateResult out;
  out.points.reserve(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    BmConfig cfg = base;
    cfg.n = n_list[i];
    BmReport rep = bm_vector_report(cfg);
    BmRatePoint pt;
    pt.n = cfg.n;
    pt.m = rep.m;
    pt.dw_thm8 = rep.dw_thm8;
    pt.x = rep.x;
    pt.slope = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      const double dn = std::log2(static_cast<double>(n_list[i]) / static_cast<double>(n_list[i - 1]));
      pt.slope = std::log2(pt.m / out.points.back().m) / dn;
    }
    out.points.push_back(std::move(pt));
  }
  out.last_slope = out.points.back().slope;
  out.aitken_slope = out.last_slope;
  if (out.points.size() >= 4) {
    const auto& p = out.points;
    const double s0 = p[p.size() - 3].slope, s1 = p[p.size() - 2].slope, s2 = p.back().slope;
    const double d2 = (s2 - s1) - (s1 - s0);
    if (std::abs(d2) > 1e-14) out.aitken_slope = s2 - (s2 - s1) * (s2 - s1) / d2;
  }
  return out;
}

}  // namespace freeprob
