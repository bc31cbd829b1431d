#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "freeprob/spd.hpp"

namespace freeprob {

// H = (A + A*) / sqrt(2N) with A filled by independent standard complex
// Gaussians from a counter-based stream: normalized traces of powers converge
// to the standard semicircle moments. N <= 4096; bitwise reproducible per seed.
Eigen::MatrixXcd sample_gue(int n, std::uint64_t seed);

// k independent GUE draws mixed by C^{1/2}; Hermitian, covariance C in the
// large-N limit.
std::vector<Eigen::MatrixXcd> sample_family(const SpdCovariance& c, int n, std::uint64_t seed);

// (1/N) Re Tr(M_{w_1} ... M_{w_k}); word entries are 1-based matrix indices.
double trace_word(std::span<const Eigen::MatrixXcd> mats, std::span<const int> word);

struct McWordResult {
  std::vector<int> word;
  double prediction;  // family_moment under C
  double estimate;    // averaged normalized trace
  double stderr_val;  // sample standard error over reps
  bool pass;          // |estimate - prediction| <= 3 stderr + 10/N^2
};

struct McReport {
  int n = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::vector<McWordResult> words;
  bool all_pass = true;
};

// Word length <= 8. Reps use derived independent streams; the aggregation
// order is fixed so results do not depend on scheduling. The pass slack is
// stderr_mult * stderr + bias_allowance / N^2.
McReport mc_compare(const SpdCovariance& c, const std::vector<std::vector<int>>& words, int n,
                    int reps, std::uint64_t seed, double stderr_mult = 3.0,
                    double bias_allowance = 10.0);

}  // namespace freeprob
