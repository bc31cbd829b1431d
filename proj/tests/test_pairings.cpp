#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "freeprob/pairings.hpp"
#include "freeprob/rng.hpp"

using namespace freeprob;

TEST_CASE("pair partition enumeration") {
  auto m0 = enumerate_pair_partitions(0);
  REQUIRE(m0.size() == 1);
  CHECK(m0[0].pairs.empty());

  auto m1 = enumerate_pair_partitions(1);
  REQUIRE(m1.size() == 1);
  CHECK(m1[0].pairs == std::vector<std::pair<int, int>>{{1, 2}});

  // deterministic order: smallest unpaired element first, partner ascending
  auto m2 = enumerate_pair_partitions(2);
  REQUIRE(m2.size() == 3);
  CHECK(m2[0].pairs == std::vector<std::pair<int, int>>{{1, 2}, {3, 4}});
  CHECK(m2[1].pairs == std::vector<std::pair<int, int>>{{1, 3}, {2, 4}});
  CHECK(m2[2].pairs == std::vector<std::pair<int, int>>{{1, 4}, {2, 3}});

  CHECK(enumerate_pair_partitions(3).size() == 15);  // 5!!
  CHECK_THROWS_AS(enumerate_pair_partitions(9), std::length_error);
  CHECK_THROWS_AS(enumerate_pair_partitions(-1), std::invalid_argument);
}

TEST_CASE("crossing numbers") {
  CHECK(crossing_number(make_pair_partition({{1, 2}, {3, 4}})) == 0);
  CHECK(crossing_number(make_pair_partition({{1, 3}, {2, 4}})) == 1);
  CHECK(crossing_number(make_pair_partition({{1, 4}, {2, 5}, {3, 6}})) == 3);
  CHECK(is_noncrossing(make_pair_partition({{1, 4}, {2, 3}})));
}

TEST_CASE("crossing count invariants") {
  for (int m = 1; m <= 6; ++m) {
    long long noncrossing = 0, total = 0;
    for_each_pair_partition(m, [&](std::span<const std::pair<int, int>> pairs, int cr) {
      ++total;
      // incremental count agrees with the standalone counter
      PairPartition p{{pairs.begin(), pairs.end()}};
      REQUIRE(crossing_number(p) == cr);
      if (cr == 0) ++noncrossing;
    });
    long long dfact = 1;
    for (int i = 3; i <= 2 * m - 1; i += 2) dfact *= i;
    CHECK(noncrossing == static_cast<long long>(catalan(m)));
    CHECK(total == dfact);
  }
}

TEST_CASE("crossing number reflection invariance") {
  for (int m = 1; m <= 5; ++m) {
    for (const auto& p : enumerate_pair_partitions(m)) {
      std::vector<std::pair<int, int>> reflected;
      for (auto [a, b] : p.pairs) reflected.emplace_back(2 * m + 1 - b, 2 * m + 1 - a);
      CHECK(crossing_number(make_pair_partition(reflected)) == crossing_number(p));
    }
  }
}

TEST_CASE("interval-respecting predicate") {
  const int sizes22[] = {2, 2};
  CHECK(is_respecting(make_pair_partition({{1, 3}, {2, 4}}), sizes22));
  CHECK_FALSE(is_respecting(make_pair_partition({{1, 2}, {3, 4}}), sizes22));
  const int sizes121[] = {1, 2, 1};
  CHECK_FALSE(is_respecting(make_pair_partition({{1, 4}, {2, 3}}), sizes121));
  const int bad[] = {2, 1};
  CHECK_THROWS_AS(is_respecting(make_pair_partition({{1, 2}, {3, 4}}), bad),
                  std::invalid_argument);
}

TEST_CASE("inversions") {
  const int id4[] = {1, 2, 3, 4};
  CHECK(inversions(id4) == 0);
  const int rev3[] = {3, 2, 1};
  CHECK(inversions(rev3) == 3);
  const int perm[] = {2, 1, 3};
  CHECK(inversions(perm) == 1);
  const int notperm[] = {1, 1, 3};
  CHECK_THROWS_AS(inversions(notperm), std::invalid_argument);
}

TEST_CASE("catalan numbers") {
  CHECK(catalan(0) == 1);
  CHECK(catalan(2) == 2);
  CHECK(catalan(3) == 5);
  CHECK(catalan(5) == 42);
  CHECK(catalan(30) == 3814986502092304ULL);
  CHECK_THROWS_AS(catalan(31), std::invalid_argument);
}

TEST_CASE("set partitions and non-crossing filter") {
  CHECK(enumerate_set_partitions(3).size() == 5);   // Bell(3)
  CHECK(enumerate_set_partitions(5).size() == 52);  // Bell(5)
  int nc4 = 0;
  for (const auto& p : enumerate_set_partitions(4))
    if (is_noncrossing(p)) ++nc4;
  CHECK(nc4 == static_cast<int>(catalan(4)));  // NC(4) = 14
}

TEST_CASE("moment-cumulant transforms") {
  // semicircle: kappa_2 = 1, all higher cumulants vanish
  const double semicircle[] = {0, 1, 0, 2};
  auto k1 = moments_to_free_cumulants(semicircle);
  CHECK(k1[0] == doctest::Approx(0).epsilon(1e-14));
  CHECK(k1[1] == doctest::Approx(1));
  CHECK(k1[2] == doctest::Approx(0).epsilon(1e-14));
  CHECK(std::abs(k1[3]) < 1e-12);

  // centered squared semicircle: all cumulants from order 2 equal 1
  const double sq[] = {0, 1, 1, 3};
  auto k2 = moments_to_free_cumulants(sq);
  CHECK(k2[1] == doctest::Approx(1));
  CHECK(k2[2] == doctest::Approx(1));
  CHECK(k2[3] == doctest::Approx(1));

  const double zeros[] = {0, 0, 0, 0, 0};
  for (double v : moments_to_free_cumulants(zeros)) CHECK(v == 0.0);

  SeedStream rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_below(8));
    std::vector<double> m(k);
    for (double& v : m) v = 2.0 * rng.next_unit() - 1.0;
    auto back = free_cumulants_to_moments(moments_to_free_cumulants(m));
    for (int i = 0; i < k; ++i) CHECK(back[i] == doctest::Approx(m[i]).epsilon(1e-12));
  }

  const double toolong[11] = {};
  CHECK_THROWS_AS(moments_to_free_cumulants(toolong), std::invalid_argument);
}
