#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "freeprob/breuer_major.hpp"
#include "freeprob/wigner.hpp"

using namespace freeprob;

TEST_CASE("increment covariance rho_H") {
  for (double h : {0.1, 0.35, 0.5, 0.8}) CHECK(rho_h(0, h) == doctest::Approx(1.0));
  for (long long r : {1LL, 5LL, 100LL}) {
    CHECK(rho_h(r, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rho_h(-r, 0.75) == rho_h(r, 0.75));
  }
  // second-difference oracle at H = 0.75, r = 10
  auto g = [](double x) { return std::pow(x, 1.5); };
  const double oracle = 0.5 * (g(11) - 2 * g(10) + g(9));
  CHECK(rho_h(10, 0.75) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK_THROWS_AS(rho_h(1, 1.5), std::invalid_argument);
}

TEST_CASE("chebyshev polynomials of the second kind") {
  CHECK(chebyshev_u(0) == std::vector<double>{1.0});
  CHECK(chebyshev_u(1) == std::vector<double>{0.0, 1.0});
  CHECK(chebyshev_u(2) == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(chebyshev_u(3) == std::vector<double>{0.0, -2.0, 0.0, 1.0});
  // orthonormal for the standard semicircle law
  for (int p = 0; p <= 6; ++p)
    for (int q = 0; q <= 6; ++q) {
      const auto up = chebyshev_u(p), uq = chebyshev_u(q);
      double val = 0.0;
      for (std::size_t i = 0; i < up.size(); ++i)
        for (std::size_t j = 0; j < uq.size(); ++j)
          val += up[i] * uq[j] * semicircle_moment(static_cast<int>(i + j), 1.0);
      CHECK(val == doctest::Approx(p == q ? 1.0 : 0.0).epsilon(1e-10));
    }
  CHECK_THROWS_AS(chebyshev_u(13), std::invalid_argument);
}

TEST_CASE("rho tail follows the power law") {
  // rho_H(r) ~ H(2H-1) r^{2H-2}; the normalization series and the truncation
  // bounds both lean on this decay
  for (double h : {0.3, 0.65, 0.8}) {
    const double r = 1e5;
    const double asymptote = h * (2 * h - 1) * std::pow(r, 2 * h - 2);
    CHECK(rho_h(static_cast<long long>(r), h) ==
          doctest::Approx(asymptote).epsilon(1e-4));
    // dyadic decay ratio of the q-th power
    const int q = 3;
    const double ratio = std::pow(rho_h(2048, h), q) / std::pow(rho_h(1024, h), q);
    CHECK(ratio == doctest::Approx(std::pow(2.0, q * (2 * h - 2))).epsilon(1e-3));
  }
}

TEST_CASE("sigma squared") {
  CHECK(sigma_sq(2, 0.5, 1e-10) == doctest::Approx(1.0));
  CHECK(sigma_sq(2, 0.6, 1e-10) > 1.0);

  // brute truncation oracle at rank 3
  const double h = 0.55;
  double brute = 1.0;
  for (long long r = 1; r <= 1'000'000; ++r) brute += 2.0 * std::pow(rho_h(r, h), 3);
  CHECK(sigma_sq(3, h, 1e-10) == doctest::Approx(brute).epsilon(1e-9));

  CHECK_THROWS_AS(sigma_sq(2, 0.8, 1e-10), std::invalid_argument);  // H >= 1 - 1/(2q)
}

TEST_CASE("contraction norms in the increment basis") {
  // H = 1/2 collapse: ||f (r) f||^2 = 1/(sigma^4 n) with sigma = 1
  for (long long n : {4LL, 32LL, 100LL}) {
    CHECK(bm_contraction_norm_sq(n, 2, 0.5, 1, 0, n, 1.0, 1.0) ==
          doctest::Approx(1.0 / n).epsilon(1e-12));
  }
  // single-increment block: c^4 rho(0)^{2q} = c^4
  const double s2 = sigma_sq(3, 0.6, 1e-10);
  const double c2 = 1.0 / (s2 * 8.0 * 1.0);
  CHECK(bm_contraction_norm_sq(8, 3, 0.6, 1, 0, 1, s2, 1.0) ==
        doctest::Approx(c2 * c2).epsilon(1e-12));

  // quadruple-sum oracle on a small block
  const long long m = 24;
  const double hurst = 0.7;
  const int q = 3, r = 1;
  double direct = 0.0;
  for (long long i = 0; i < m; ++i)
    for (long long j = 0; j < m; ++j)
      for (long long k = 0; k < m; ++k)
        for (long long l = 0; l < m; ++l)
          direct += std::pow(rho_h(i - j, hurst), r) * std::pow(rho_h(k - l, hurst), r) *
                    std::pow(rho_h(i - k, hurst), q - r) * std::pow(rho_h(j - l, hurst), q - r);
  const double s2b = sigma_sq(q, hurst, 1e-10);
  const double c2b = 1.0 / (s2b * static_cast<double>(m) * 1.0);
  CHECK(bm_contraction_norm_sq(m, q, hurst, r, 0, m, s2b, 1.0) ==
        doctest::Approx(c2b * c2b * direct).epsilon(1e-10));

  CHECK_THROWS_AS(bm_contraction_norm_sq(4096, 2, 0.3, 1, 0, 4096, 1.0, 1.0), std::length_error);
}

TEST_CASE("contraction norms decrease in n") {
  double prev = 1e300;
  const double s2 = sigma_sq(3, 0.3, 1e-10);
  for (long long n = 32; n <= 256; n *= 2) {
    const double v = bm_contraction_norm_sq(n, 3, 0.3, 1, 0, n, s2, 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("truncated-range approximation tracks the exact mode") {
  // independent-increment case: the window sees everything, agreement is exact
  double err = 0.0;
  const double approx_half =
      bm_contraction_norm_sq_approx(512, 2, 0.5, 1, 0, 512, 1.0, 1.0, 128, &err);
  CHECK(approx_half == doctest::Approx(1.0 / 512).epsilon(1e-12));
  CHECK(err == 0.0);

  // correlated increments: close to the exact value, with an honest estimate
  for (double hurst : {0.3, 0.6}) {
    const double s2 = sigma_sq(3, hurst, 1e-10);
    const double exact = bm_contraction_norm_sq(1024, 3, hurst, 1, 0, 1024, s2, 1.0);
    double est = 0.0;
    const double approx =
        bm_contraction_norm_sq_approx(1024, 3, hurst, 1, 0, 1024, s2, 1.0, 256, &est);
    CHECK(std::abs(approx - exact) <= std::max(10.0 * est, 0.02 * exact));
  }

  // reports feed the approximation automatically beyond the exact cap
  BmConfig big{0.6, 3, 1LL << 12, {0.0, 1.0}, 1e-10};
  BmReport rep = bm_vector_report(big);
  BmConfig capped{0.6, 3, 1LL << 11, {0.0, 1.0}, 1e-10};
  BmReport prev = bm_vector_report(capped);
  CHECK(rep.x[0] < prev.x[0]);
  CHECK(rep.x_error[0] > 0.0);
  CHECK(prev.x_error[0] == 0.0);
  CHECK(rep.x_error[0] < 0.05 * rep.x[0]);
}

TEST_CASE("vector report closed form at H = 1/2") {
  BmConfig cfg{0.5, 2, 64, {0.0, 1.0}, 1e-10};
  BmReport rep = bm_vector_report(cfg);
  REQUIRE(rep.x.size() == 1);
  CHECK(rep.x[0] == doctest::Approx(1.0 / 64).epsilon(1e-12));
  CHECK(rep.y[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.m == doctest::Approx(std::pow(2.0, 0.75) * std::pow(64.0, -0.25)).epsilon(1e-12));
  CHECK(rep.dw_thm8 == doctest::Approx(rep.m).epsilon(1e-12));
}

TEST_CASE("cross covariances decay for disjoint blocks") {
  double prev = 1.0;
  for (long long n : {64LL, 256LL, 1024LL}) {
    BmConfig cfg{0.6, 2, n, {0.0, 0.5, 1.0}, 1e-10};
    BmReport rep = bm_vector_report(cfg);
    const double off = std::abs(rep.gram(0, 1));
    CHECK(off < prev);
    prev = off;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("theoretical rates") {
  CHECK(theoretical_rate(2, 0.3) == doctest::Approx(-0.25));
  CHECK(theoretical_rate(2, 0.5) == doctest::Approx(-0.25));
  CHECK(theoretical_rate(3, 0.6) == doctest::Approx(-0.2));
  CHECK(theoretical_rate(3, 0.75) == doctest::Approx((0.75 - 1.0) / 2.0));  // boundary 3/4
  CHECK(theoretical_rate(3, 0.8) == doctest::Approx((2 * 3 * 0.8 - 6 + 1) / 4.0));
  CHECK(theoretical_rate(2, 0.7) == doctest::Approx((4 * 0.7 - 3) / 4.0));
  CHECK_THROWS_AS(theoretical_rate(2, 0.75), std::invalid_argument);
}

TEST_CASE("rate experiment, exact case") {
  BmConfig cfg{0.5, 2, 0, {0.0, 1.0}, 1e-10};
  const long long ns[] = {32, 64, 128, 256};
  BmRateResult res = bm_rate_experiment(cfg, ns);
  REQUIRE(res.points.size() == 4);
  for (std::size_t i = 1; i < res.points.size(); ++i)
    CHECK(res.points[i].slope == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(res.aitken_slope == doctest::Approx(-0.25).epsilon(1e-9));
}

TEST_CASE("degenerate blocks are rejected") {
  BmConfig cfg{0.5, 2, 4, {0.0, 0.1, 1.0}, 1e-10};  // first block empty at n = 4
  CHECK_THROWS_AS(bm_vector_report(cfg), std::invalid_argument);
  BmConfig bad_times{0.5, 2, 16, {0.0, 0.0, 1.0}, 1e-10};
  CHECK_THROWS_AS(bm_vector_report(bad_times), std::invalid_argument);
}
