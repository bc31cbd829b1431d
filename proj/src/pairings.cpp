#include "freeprob/pairings.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <stdexcept>
#include <string>

namespace freeprob {

namespace {

constexpr int kMaxPoints = 16;  // enumeration cap, ~2e6 matchings

void check_enumeration_cap(int m) {
  if (m < 0) throw std::invalid_argument("pair partition order must be nonnegative");
  if (2 * m > kMaxPoints)
    throw std::length_error("pair partition enumeration capped at 2m <= " + std::to_string(kMaxPoints));
}

struct MatchingEnumerator {
  int n = 0;
  std::vector<std::pair<int, int>> pairs;
  std::vector<bool> used;
  const std::function<void(std::span<const std::pair<int, int>>, int)>* visit = nullptr;

  void run(int crossings) {
    int a = 0;
    while (a < n && used[a]) ++a;
    if (a == n) {
      (*visit)(pairs, crossings);
      return;
    }
    used[a] = true;
    for (int b = a + 1; b < n; ++b) {
      if (used[b]) continue;
      // new pair (a,b): every open pair (c,d) has c < a; it crosses iff a < d < b
      int added = 0;
      for (const auto& [c, d] : pairs)
        if (d > a + 1 && d < b + 1) ++added;  // stored 1-based
      used[b] = true;
      pairs.emplace_back(a + 1, b + 1);
      run(crossings + added);
      pairs.pop_back();
      used[b] = false;
    }
    used[a] = false;
  }
};

}  // namespace

PairPartition make_pair_partition(std::vector<std::pair<int, int>> pairs) {
  const int n = static_cast<int>(pairs.size()) * 2;
  std::vector<bool> seen(n + 1, false);
  for (auto& [a, b] : pairs) {
    if (a > b) std::swap(a, b);
    if (a < 1 || b > n || a == b) throw std::invalid_argument("pair partition: index out of range");
    if (seen[a] || seen[b]) throw std::invalid_argument("pair partition: repeated index");
    seen[a] = seen[b] = true;
  }
  std::sort(pairs.begin(), pairs.end());
  return PairPartition{std::move(pairs)};
}

void for_each_pair_partition(
    int m, const std::function<void(std::span<const std::pair<int, int>>, int)>& visit) {
  check_enumeration_cap(m);
  if (m == 0) {
    visit({}, 0);
    return;
  }
  MatchingEnumerator e;
  e.n = 2 * m;
  e.used.assign(e.n, false);
  e.pairs.reserve(m);
  e.visit = &visit;
  e.run(0);
}

std::vector<PairPartition> enumerate_pair_partitions(int m) {
  check_enumeration_cap(m);
  std::vector<PairPartition> out;
  for_each_pair_partition(m, [&](std::span<const std::pair<int, int>> pairs, int) {
    out.push_back(PairPartition{{pairs.begin(), pairs.end()}});
  });
  return out;
}

int crossing_number(const PairPartition& p) {
  int cr = 0;
  const auto& ps = p.pairs;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      auto [a, b] = ps[i];
      auto [c, d] = ps[j];
      if (c > a && c < b && d > b) ++cr;
      if (a > c && a < d && b > d) ++cr;  // unsorted inputs
    }
  return cr;
}

bool is_noncrossing(const PairPartition& p) { return crossing_number(p) == 0; }

bool is_respecting(std::span<const std::pair<int, int>> pairs, std::span<const int> interval_sizes) {
  int total = 0;
  for (int s : interval_sizes) {
    if (s <= 0) throw std::invalid_argument("interval sizes must be positive");
    total += s;
  }
  if (total != static_cast<int>(pairs.size()) * 2)
    throw std::invalid_argument("interval sizes must sum to the number of points");
  // interval index of each point
  std::vector<int> iv(total + 1);
  int pos = 1, idx = 0;
  for (int s : interval_sizes) {
    for (int i = 0; i < s; ++i) iv[pos++] = idx;
    ++idx;
  }
  for (const auto& [a, b] : pairs)
    if (iv[a] == iv[b]) return false;
  return true;
}

bool is_respecting(const PairPartition& p, std::span<const int> interval_sizes) {
  return is_respecting(std::span<const std::pair<int, int>>(p.pairs), interval_sizes);
}

long long inversions(std::span<const int> perm) {
  const int k = static_cast<int>(perm.size());
  std::vector<bool> seen(k + 1, false);
  for (int v : perm) {
    if (v < 1 || v > k || seen[v]) throw std::invalid_argument("not a permutation of {1..k}");
    seen[v] = true;
  }
  long long inv = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (perm[i] > perm[j]) ++inv;
  return inv;
}

std::uint64_t catalan(int m) {
  if (m < 0 || m > 30) throw std::invalid_argument("catalan supported for 0 <= m <= 30");
  std::uint64_t c = 1;
  for (int n = 0; n < m; ++n) c = c * 2 * (2 * n + 1) / (n + 2);
  return c;
}

std::vector<SetPartition> enumerate_set_partitions(int k) {
  if (k < 0 || k > 10) throw std::invalid_argument("set partition enumeration capped at k <= 10");
  std::vector<SetPartition> out;
  if (k == 0) {
    out.push_back({});
    return out;
  }
  // restricted growth strings
  std::vector<int> rgs(k, 0);
  while (true) {
    int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    SetPartition p;
    p.blocks.assign(nblocks, {});
    for (int i = 0; i < k; ++i) p.blocks[rgs[i]].push_back(i + 1);
    out.push_back(std::move(p));
    // next RGS
    int i = k - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int j = 0; j < i; ++j) mx = std::max(mx, rgs[j]);
      if (rgs[i] <= mx) {
        ++rgs[i];
        std::fill(rgs.begin() + i + 1, rgs.end(), 0);
        break;
      }
    }
    if (i == 0) break;
  }
  return out;
}

bool is_noncrossing(const SetPartition& p) {
  // crossing iff two consecutive-in-block gaps interleave: a < b < c < d with
  // (a,c) consecutive in one block and (b,d) consecutive in another
  std::vector<std::pair<int, int>> gaps;
  std::vector<int> block_of;
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const auto& b = p.blocks[bi];
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      gaps.emplace_back(b[i], b[i + 1]);
      block_of.push_back(static_cast<int>(bi));
    }
  }
  for (std::size_t i = 0; i < gaps.size(); ++i)
    for (std::size_t j = 0; j < gaps.size(); ++j) {
      if (block_of[i] == block_of[j]) continue;
      auto [a, c] = gaps[i];
      auto [b, d] = gaps[j];
      if (a < b && b < c && c < d) return false;
    }
  return true;
}

namespace {

// NC(n) for n = 0..10, computed once
const std::vector<SetPartition>& noncrossing_partitions(int n) {
  static std::array<std::vector<SetPartition>, 11> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int k = 0; k <= 10; ++k)
      for (auto& p : enumerate_set_partitions(k))
        if (is_noncrossing(p)) cache[k].push_back(std::move(p));
  });
  if (n < 0 || n > 10) throw std::invalid_argument("non-crossing partitions available for n <= 10");
  return cache[n];
}

}  // namespace

std::vector<double> free_cumulants_to_moments(std::span<const double> cumulants) {
  const int k = static_cast<int>(cumulants.size());
  if (k > 10) throw std::invalid_argument("moment-cumulant transform capped at order 10");
  std::vector<double> moments(k, 0.0);
  for (int n = 1; n <= k; ++n) {
    double m = 0.0;
    for (const auto& p : noncrossing_partitions(n)) {
      double prod = 1.0;
      for (const auto& b : p.blocks) prod *= cumulants[b.size() - 1];
      m += prod;
    }
    moments[n - 1] = m;
  }
  return moments;
}

std::vector<double> moments_to_free_cumulants(std::span<const double> moments) {
  const int k = static_cast<int>(moments.size());
  if (k > 10) throw std::invalid_argument("moment-cumulant transform capped at order 10");
  std::vector<double> kappa(k, 0.0);
  for (int n = 1; n <= k; ++n) {
    double rest = 0.0;
    for (const auto& p : noncrossing_partitions(n)) {
      if (p.blocks.size() == 1) continue;  // the full block carries kappa_n itself
      double prod = 1.0;
      for (const auto& b : p.blocks) prod *= kappa[b.size() - 1];
      rest += prod;
    }
    kappa[n - 1] = moments[n - 1] - rest;
  }
  return kappa;
}

}  // namespace freeprob
