#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace freeprob {

// Perfect matching of {1..2m}: pairs (a,b) with a<b, sorted by first element,
// every point covered exactly once.
struct PairPartition {
  std::vector<std::pair<int, int>> pairs;

  int n_points() const { return static_cast<int>(pairs.size()) * 2; }
  int n_pairs() const { return static_cast<int>(pairs.size()); }
};

// Validates the matching invariants; throws std::invalid_argument on violation.
PairPartition make_pair_partition(std::vector<std::pair<int, int>> pairs);

// All (2m-1)!! matchings of {1..2m} in deterministic order: recursion on the
// smallest unpaired element with partners taken ascending. Hard cap 2m <= 16.
std::vector<PairPartition> enumerate_pair_partitions(int m);

// Visits every matching of {1..2m} without materializing the list. The span
// holds the pairs of the current matching; `crossings` is its crossing number
// (maintained incrementally during the recursion). Same order as above.
void for_each_pair_partition(
    int m, const std::function<void(std::span<const std::pair<int, int>>, int crossings)>& visit);

// Number of interleaved pairs {(a,b),(c,d)} with a<c<b<d.
int crossing_number(const PairPartition& p);
bool is_noncrossing(const PairPartition& p);

// True iff no pair has both endpoints inside one of the consecutive intervals
// of the given sizes (which must sum to the number of points).
bool is_respecting(const PairPartition& p, std::span<const int> interval_sizes);
bool is_respecting(std::span<const std::pair<int, int>> pairs, std::span<const int> interval_sizes);

// Number of inversions of a permutation of {1..k}, given as its value sequence.
long long inversions(std::span<const int> perm);

// Exact Catalan number, m <= 30.
std::uint64_t catalan(int m);

// Partition of {1..k} into disjoint nonempty blocks, ordered by least element.
struct SetPartition {
  std::vector<std::vector<int>> blocks;
};

std::vector<SetPartition> enumerate_set_partitions(int k);  // k <= 10
bool is_noncrossing(const SetPartition& p);

// Moment <-> free cumulant transforms through the non-crossing recursion
//   m_n = sum over pi in NC(n) of prod over blocks of kappa_{|block|}.
// Brute-force over NC(n) by design; orders up to 10.
std::vector<double> moments_to_free_cumulants(std::span<const double> moments);
std::vector<double> free_cumulants_to_moments(std::span<const double> cumulants);

}  // namespace freeprob
