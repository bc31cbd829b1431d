#include "freeprob/gue.hpp"

#include <cmath>
#include <stdexcept>

#include "freeprob/rng.hpp"
#include "freeprob/wigner.hpp"

namespace freeprob {

Eigen::MatrixXcd sample_gue(int n, std::uint64_t seed) {
  if (n < 1 || n > 4096) throw std::invalid_argument("sample_gue: dimension must lie in 1..4096");
  SeedStream rng = SeedStream::derive(seed, 0x67756575ULL);
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto [re, im] = rng.gaussian_pair_at(static_cast<std::uint64_t>(i) * n + j);
      a(i, j) = std::complex<double>(re, im) / std::sqrt(2.0);  // E|a_ij|^2 = 1
    }
  const double scale = 1.0 / std::sqrt(2.0 * n);
  Eigen::MatrixXcd h = scale * (a + a.adjoint());
  return h;
}

std::vector<Eigen::MatrixXcd> sample_family(const SpdCovariance& c, int n, std::uint64_t seed) {
  const int k = c.dim();
  std::vector<Eigen::MatrixXcd> x;
  x.reserve(k);
  for (int j = 0; j < k; ++j)
    x.push_back(sample_gue(n, SeedStream::derive(seed, 0x66616dULL + j).next_u64()));
  std::vector<Eigen::MatrixXcd> y(k, Eigen::MatrixXcd::Zero(n, n));
  const Eigen::MatrixXd& root = c.sqrt();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) y[i] += root(i, j) * x[j];
  return y;
}

double trace_word(std::span<const Eigen::MatrixXcd> mats, std::span<const int> word) {
  if (word.empty()) return 1.0;
  if (word.size() > 8) throw std::length_error("trace_word: word length capped at 8");
  const int n = static_cast<int>(mats[0].rows());
  for (int w : word)
    if (w < 1 || w > static_cast<int>(mats.size()))
      throw std::invalid_argument("trace_word: word index out of range");

  auto partial = [&](std::size_t lo, std::size_t hi) {  // product over [lo, hi)
    Eigen::MatrixXcd p = mats[word[lo] - 1];
    for (std::size_t i = lo + 1; i < hi; ++i) p *= mats[word[i] - 1];
    return p;
  };

  if (word.size() == 1) return mats[word[0] - 1].trace().real() / n;
  const std::size_t mid = word.size() / 2;
  Eigen::MatrixXcd left = partial(0, mid);
  Eigen::MatrixXcd right = partial(mid, word.size());
  // Tr(LR) without forming the product
  const std::complex<double> tr = left.cwiseProduct(right.transpose()).sum();
  return tr.real() / n;
}

McReport mc_compare(const SpdCovariance& c, const std::vector<std::vector<int>>& words, int n,
                    int reps, std::uint64_t seed, double stderr_mult, double bias_allowance) {
  if (reps < 2) throw std::invalid_argument("mc_compare: needs at least two reps");
  McReport rep;
  rep.n = n;
  rep.reps = reps;
  rep.seed = seed;

  // per-rep estimates, filled in a fixed order
  std::vector<std::vector<double>> est(words.size(), std::vector<double>(reps, 0.0));
  for (int r = 0; r < reps; ++r) {
    auto fam = sample_family(c, n, SeedStream::derive(seed, 0x726570ULL + r).next_u64());
    for (std::size_t w = 0; w < words.size(); ++w) est[w][r] = trace_word(fam, words[w]);
  }

  for (std::size_t w = 0; w < words.size(); ++w) {
    McWordResult res;
    res.word = words[w];
    res.prediction = family_moment(c.matrix(), words[w]);
    double mean = 0.0;
    for (double v : est[w]) mean += v;
    mean /= reps;
    double var = 0.0;
    for (double v : est[w]) var += (v - mean) * (v - mean);
    var /= (reps - 1);
    res.estimate = mean;
    res.stderr_val = std::sqrt(var / reps);
    const double slack = stderr_mult * res.stderr_val + bias_allowance / (static_cast<double>(n) * n);
    res.pass = std::abs(res.estimate - res.prediction) <= slack;
    rep.all_pass = rep.all_pass && res.pass;
    rep.words.push_back(std::move(res));
  }
  return rep;
}

}  // namespace freeprob
