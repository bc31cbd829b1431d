#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "freeprob/pairings.hpp"
#include "freeprob/rng.hpp"
#include "freeprob/wigner.hpp"

using namespace freeprob;

namespace {

Kernel e_tensor_e() {
  Eigen::VectorXcd e(2);
  e << std::sqrt(2.0), 0.0;
  std::vector<Eigen::VectorXcd> f{e, e};
  return rank_one(f, 0.5);
}

}  // namespace

TEST_CASE("semicircle moments") {
  CHECK(semicircle_moment(2, 1.0) == 1.0);
  CHECK(semicircle_moment(4, 1.0) == 2.0);
  CHECK(semicircle_moment(6, 2.0) == doctest::Approx(40.0));
  CHECK(semicircle_moment(7, 3.0) == 0.0);
  CHECK(semicircle_moment(0, 5.0) == 1.0);
  CHECK_THROWS_AS(semicircle_moment(32, 1.0), std::invalid_argument);
}

TEST_CASE("family moments") {
  Eigen::MatrixXd c(2, 2);
  c << 1.3, 0.4, 0.4, 0.9;
  const int w2[] = {1, 2};
  CHECK(family_moment(c, w2) == doctest::Approx(0.4));
  const int w4[] = {1, 2, 2, 1};
  CHECK(family_moment(c, w4) ==
        doctest::Approx(c(0, 1) * c(1, 0) + c(0, 0) * c(1, 1)));
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(1, 1);
  const std::vector<int> w6(6, 1);
  CHECK(family_moment(id, w6) == doctest::Approx(5.0));  // catalan(3)
  const int bad[] = {1, 3};
  CHECK_THROWS_AS(family_moment(c, bad), std::invalid_argument);
}

TEST_CASE("q-deformed family moments") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(1, 1);
  const std::vector<int> w4(4, 1), w6(6, 1);
  for (double q : {-0.9, -0.2, 0.0, 0.5, 1.0}) {
    CHECK(q_family_moment(id, q, w4) == doctest::Approx(2.0 + q).epsilon(1e-13));
    CHECK(q_family_moment(id, q, w6) ==
          doctest::Approx(5.0 + 6 * q + 3 * q * q + q * q * q).epsilon(1e-13));
  }
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 0.3, 0.3, 2.0;
  const int w[] = {1, 2, 1, 2};
  CHECK(q_family_moment(c, 0.0, w) == family_moment(c, w));
  CHECK_THROWS_AS(q_family_moment(c, 1.5, w), std::invalid_argument);
}

TEST_CASE("q-Fock inner product") {
  Eigen::VectorXcd e1(2), e2(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  const double q = 0.37;

  std::vector<Eigen::VectorXcd> g1{e1}, h1{e1, e2};
  CHECK(q_fock_inner(g1, h1, q) == Complex(0.0));
  CHECK(q_fock_inner(g1, std::vector<Eigen::VectorXcd>{e2}, q) == Complex(0.0));

  std::vector<Eigen::VectorXcd> distinct{e1, e2};
  CHECK(std::abs(q_fock_inner(distinct, distinct, q) - Complex(1.0)) < 1e-15);
  std::vector<Eigen::VectorXcd> repeated{e1, e1};
  CHECK(std::abs(q_fock_inner(repeated, repeated, q) - Complex(1.0 + q)) < 1e-15);
}

TEST_CASE("product formula components") {
  const int n = 3;
  const double h = 0.5;
  Kernel f = random_kernel(1, n, h, 1);
  Kernel g = random_kernel(1, n, h, 2);
  auto comps = wigner_product(f, g);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].order() == 2);
  CHECK(comps[1].order() == 0);
  Complex dot = 0.0;
  for (int s = 0; s < n; ++s) dot += f[s] * g[s];
  CHECK(std::abs(comps[1].scalar_value() - h * dot) < 1e-14);

  Kernel e2 = e_tensor_e();
  auto sq = wigner_product(e2, e2);
  REQUIRE(sq.size() == 3);
  CHECK((sq[1].data() - e2.data()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(sq[2].scalar_value() - 1.0) < 1e-14);

  Kernel z(2, n, h);
  for (const auto& comp : wigner_product(f, z)) CHECK(comp.data().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("joint moments") {
  // same order: tau(I(f) I(g)) is the bi-isometry pairing
  Kernel f = random_kernel(2, 3, 0.8, 11, /*mirror=*/true);
  Kernel g = random_kernel(2, 3, 0.8, 12, /*mirror=*/true);
  const Kernel fg[2] = {f, g};
  CHECK(std::abs(wigner_joint_moment(fg) - inner(g, f)) < 1e-12);

  // distinct orders are orthogonal
  Kernel h3 = random_kernel(3, 3, 0.8, 13);
  const Kernel cross[2] = {f, h3};
  CHECK(wigner_joint_moment(cross) == Complex(0.0));  // odd total order
  Kernel h4 = random_kernel(4, 3, 0.8, 14);
  const Kernel cross2[2] = {f, h4};
  CHECK(std::abs(wigner_joint_moment(cross2)) < 1e-12);

  // tau((S^2-1)^4) by binomial expansion over the Catalan moments
  double expand4 = 0.0;
  const double binom4[5] = {1, 4, 6, 4, 1};
  for (int j = 0; j <= 4; ++j)
    expand4 += binom4[j] * (j % 2 ? -1.0 : 1.0) * semicircle_moment(2 * (4 - j), 1.0);
  CHECK(expand4 == 3.0);
  Kernel e2 = e_tensor_e();
  const Kernel word4[4] = {e2, e2, e2, e2};
  CHECK(std::abs(wigner_joint_moment(word4) - Complex(expand4)) < 1e-12);

  // degree cap
  Kernel big = random_kernel(3, 2, 1.0, 15);
  const Kernel word6[6] = {big, big, big, big, big, big};
  CHECK_THROWS_AS(wigner_joint_moment(word6), std::length_error);
}

TEST_CASE("joint moments agree with the pairing-sum oracle") {
  SeedStream rng(314);
  for (int trial = 0; trial < 25; ++trial) {
    const int r = 2 + static_cast<int>(rng.next_below(3));
    std::vector<int> orders(r);
    int total = 0;
    for (int& o : orders) {
      o = 1 + static_cast<int>(rng.next_below(3));
      total += o;
    }
    if (total % 2) {
      total += orders[0] == 3 ? -1 : 1;
      orders[0] = orders[0] == 3 ? 2 : orders[0] + 1;
    }
    std::vector<Kernel> fs;
    for (int o : orders) fs.push_back(random_kernel(o, 2, 0.9, rng.next_u64()));
    Complex oracle = 0.0;
    for_each_pair_partition(total / 2, [&](std::span<const std::pair<int, int>> pairs, int cr) {
      if (cr != 0 || !is_respecting(pairs, orders)) return;
      oracle += pairing_integral(fs, pairs);
    });
    CHECK(std::abs(wigner_joint_moment(fs) - oracle) < 1e-10);
  }
}

TEST_CASE("fourth moment identity") {
  Kernel e2 = e_tensor_e();
  FourthMoment fm = fourth_moment_identity(e2);
  CHECK(fm.lhs == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(fm.rhs == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(fm.excess == doctest::Approx(1.0).epsilon(1e-13));

  // order 1: no contraction terms, tau(F^4) = 2 ||f||^4
  Kernel f1 = random_kernel(1, 4, 0.7, 21, /*mirror=*/true);
  FourthMoment fm1 = fourth_moment_identity(f1);
  const double y = norm_sq(f1);
  CHECK(fm1.lhs == doctest::Approx(2 * y * y).epsilon(1e-12));
  CHECK(fm1.excess == 0.0);

  CHECK(fm.rhs - 2 * norm_sq(e2) * norm_sq(e2) >= -1e-12);

  Kernel notmirror = random_kernel(2, 3, 1.0, 22, /*mirror=*/false);
  CHECK_THROWS_AS(fourth_moment_identity(notmirror), std::invalid_argument);
}

TEST_CASE("operator norm estimates and the (n+1) bound") {
  Kernel z(2, 2, 0.5);
  CHECK(opnorm_estimate(z, 4) == 0.0);
  CHECK(haagerup_check(z));

  Kernel e2 = e_tensor_e();
  const double est = opnorm_estimate(e2, 4);
  CHECK(est <= 3.0 * (1 + 1e-9));
  // tau((S^2-1)^8) = 91 by binomial expansion over the Catalan moments
  double expand8 = 0.0;
  const double binom8[9] = {1, 8, 28, 56, 70, 56, 28, 8, 1};
  for (int j = 0; j <= 8; ++j)
    expand8 += binom8[j] * (j % 2 ? -1.0 : 1.0) * semicircle_moment(2 * (8 - j), 1.0);
  CHECK(expand8 == 91.0);
  CHECK(est == doctest::Approx(std::pow(expand8, 0.125)).epsilon(1e-12));
  CHECK(haagerup_check(e2));

  // order-1 unit kernel: estimates increase toward the spectral edge 2
  Kernel f(1, 2, 0.5);
  f.data()[0] = std::sqrt(2.0);
  double prev = 0.0;
  for (int m : {1, 2, 4, 8}) {
    const double v = opnorm_estimate(f, m);
    CHECK(v >= prev);
    CHECK(v <= 2.0 * (1 + 1e-9));
    prev = v;
  }
  CHECK_THROWS_AS(opnorm_estimate(f, 9), std::length_error);
}

TEST_CASE("gradient norms and the Poincare inequality") {
  Kernel f1 = random_kernel(1, 3, 0.6, 31);
  CHECK(grad_norm_sq(1, f1) == doctest::Approx(norm_sq(f1)));

  Kernel f3 = random_kernel(3, 2, 1.0, 32);
  Kernel unit = f3;
  unit *= Complex(1.0 / kernel_norm(f3));
  CHECK(grad_norm_sq(3, unit) == doctest::Approx(3.0).epsilon(1e-12));

  for (std::uint64_t s = 0; s < 10; ++s) {
    const int order = 1 + static_cast<int>(s % 3);
    Kernel f = random_kernel(order, 3, 0.6, 100 + s);
    CHECK(norm_sq(f) <= grad_norm_sq(order, f) + 1e-12);
  }
}

TEST_CASE("wigner vector") {
  Kernel f = random_kernel(2, 3, 0.5, 41, /*mirror=*/true);
  Kernel g = random_kernel(2, 3, 0.5, 42, /*mirror=*/true);
  Kernel h = random_kernel(1, 3, 0.5, 43, /*mirror=*/true);
  WignerVector v = WignerVector::from_components({{2, f}, {2, g}, {1, h}});
  CHECK(v.all_mirror_symmetric());
  Eigen::MatrixXd gram = v.gram();
  CHECK(gram(0, 1) == doctest::Approx(gram(1, 0)));
  CHECK(gram(0, 2) == 0.0);  // distinct orders
  CHECK(gram(2, 2) == doctest::Approx(norm_sq(h)));

  CHECK_THROWS_AS(WignerVector::from_components({{1, f}}), std::invalid_argument);
  CHECK_THROWS_AS(WignerVector::from_components({{0, Kernel::scalar(1.0, 3, 0.5)}}),
                  std::invalid_argument);
}
