#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "freeprob/rng.hpp"
#include "freeprob/stein.hpp"

using namespace freeprob;

namespace {

Kernel e_tensor_e() {
  Eigen::VectorXcd e(2);
  e << std::sqrt(2.0), 0.0;
  std::vector<Eigen::VectorXcd> f{e, e};
  return rank_one(f, 0.5);
}

Kernel random_mirror_unit(int order, int grid, double h, std::uint64_t seed) {
  Kernel k = random_kernel(order, grid, h, seed, true);
  k *= Complex(1.0 / kernel_norm(k));
  return k;
}

}  // namespace

TEST_CASE("spd analysis") {
  const SpdCovariance id = SpdCovariance::analyze(Eigen::MatrixXd::Identity(3, 3));
  CHECK((id.sqrt() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(id.condition_number() == doctest::Approx(1.0));

  Eigen::MatrixXd d(2, 2);
  d << 4.0, 0.0, 0.0, 1.0;
  const SpdCovariance sd = SpdCovariance::analyze(d);
  CHECK(sd.sqrt()(0, 0) == doctest::Approx(2.0));
  CHECK(sd.sqrt()(1, 1) == doctest::Approx(1.0));
  CHECK(sd.opnorm() == doctest::Approx(4.0));
  CHECK(sd.inverse_opnorm() == doctest::Approx(1.0));
  CHECK(sd.condition_number() == doctest::Approx(4.0));

  Eigen::MatrixXd c(2, 2);
  c << 2.0, 1.0, 1.0, 2.0;
  const SpdCovariance sc = SpdCovariance::analyze(c);
  CHECK(sc.opnorm() == doctest::Approx(3.0));
  CHECK(sc.inverse_opnorm() == doctest::Approx(1.0));
  CHECK(sc.condition_number() == doctest::Approx(3.0));
  CHECK((sc.sqrt() * sc.sqrt() - c).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((sc.matrix() * sc.inverse() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(SpdCovariance::analyze(asym), std::invalid_argument);
  Eigen::MatrixXd npd(2, 2);
  npd << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(SpdCovariance::analyze(npd), std::invalid_argument);
}

TEST_CASE("ou covariance") {
  Eigen::MatrixXd c(2, 2);
  c << 2.0, 0.6, 0.6, 1.2;
  const SpdCovariance spd = SpdCovariance::analyze(c);
  CHECK(ou_covariance(spd, 0.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ou_covariance(spd, 500.0) - c).cwiseAbs().maxCoeff() < 1e-12);

  const SpdCovariance scalar = SpdCovariance::analyze(Eigen::MatrixXd::Constant(1, 1, 2.0));
  CHECK(ou_covariance(scalar, 2.0)(0, 0) == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))));
  CHECK_THROWS_AS(ou_covariance(spd, -0.1), std::invalid_argument);
}

TEST_CASE("gamma discrepancy, first chaos") {
  Kernel f = random_kernel(1, 4, 0.5, 1, true);
  Kernel g = random_kernel(1, 4, 0.5, 2, true);
  for (double a : {-0.3, 0.0, 1.7}) {
    const double expect = std::norm(Complex(a) - inner(g, f));
    CHECK(gamma_discrepancy_sq(f, g, a) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("gamma discrepancy, rank-one order two") {
  Kernel e2 = e_tensor_e();
  const GammaExpansion ex = gamma_discrepancy_expansion(e2, e2, 1.0);
  CHECK(ex.has_constant);
  CHECK(std::abs(ex.constant - Complex(1.0)) < 1e-13);  // tau(F G) = <f,g> = 1
  REQUIRE(ex.terms.size() == 2);                        // (S^2-1)(x)1 and S(x)S pieces
  CHECK(ex.terms[0].norm_sq == doctest::Approx(1.0));
  CHECK(ex.terms[1].norm_sq == doctest::Approx(1.0));
  CHECK(ex.total == doctest::Approx(2.0).epsilon(1e-12));

  Kernel z(2, 2, 0.5);
  CHECK(gamma_discrepancy_sq(e2, z, 0.0) == 0.0);

  Kernel notmirror = random_kernel(2, 2, 0.5, 3);
  CHECK_THROWS_AS(gamma_discrepancy_sq(e2, notmirror, 0.0), std::invalid_argument);
}

TEST_CASE("gamma discrepancy, higher order against lower order") {
  // p = 2, q = 1: a single expansion term I_1(h (x) 1) with
  // h = integral over t of f(., t) conj g(t)
  const int n = 4;
  const double step = 0.5;
  Kernel f = random_kernel(2, n, step, 61, true);
  Kernel g = random_kernel(1, n, step, 62, true);
  Kernel k(1, n, step);
  for (int s = 0; s < n; ++s) {
    Complex acc = 0.0;
    for (int t = 0; t < n; ++t) acc += f[s * n + t] * std::conj(g[t]);
    k[s] = step * acc;
  }
  const double a = 0.4;
  const GammaExpansion ex = gamma_discrepancy_expansion(f, g, a);
  CHECK_FALSE(ex.has_constant);
  REQUIRE(ex.terms.size() == 1);
  CHECK(ex.terms[0].left_order == 1);
  CHECK(ex.terms[0].right_order == 0);
  CHECK(ex.total == doctest::Approx(a * a + norm_sq(k)).epsilon(1e-12));
  CHECK(gamma_discrepancy_sq(f, g, a) <= lemma8_rhs(f, g, a) + 1e-12);

  // and the mirror entry is a genuinely different element: p = 1, q = 2 has
  // two expansion terms
  CHECK(gamma_discrepancy_expansion(g, f, a).terms.size() == 2);
}

TEST_CASE("lemma-8 bound") {
  Kernel f = random_kernel(1, 3, 0.5, 4, true);
  Kernel g = random_kernel(1, 3, 0.5, 5, true);
  const double a = std::real(inner(g, f));
  CHECK(lemma8_rhs(f, g, a) == doctest::Approx(0.0));
  CHECK(gamma_discrepancy_sq(f, g, a) == doctest::Approx(0.0));

  Kernel e2 = e_tensor_e();
  CHECK(lemma8_rhs(e2, e2, 1.0) >= 2.0 - 1e-12);

  // p = 1 < q = 3 branch, written out from the contraction norms
  Kernel f1 = random_mirror_unit(1, 3, 0.5, 6);
  Kernel g3 = random_mirror_unit(3, 3, 0.5, 7);
  const double f2 = norm_sq(f1), g2 = norm_sq(g3);
  auto cn = [&](const Kernel& u, int r) { return kernel_norm(contract(u, u, r)); };
  double expect = 0.0;                  // a = 0
  expect += f2 * cn(g3, 2);             // special m = p, l = p-1 term
  expect += std::min(cn(f1, 0) * g2, cn(g3, 1) * f2);  // m = 2, l = 0
  expect += std::min(cn(f1, 0) * g2, cn(g3, 0) * f2);  // m = 3, l = 0
  CHECK(lemma8_rhs(f1, g3, 0.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(gamma_discrepancy_sq(f1, g3, 0.0) <= lemma8_rhs(f1, g3, 0.0) + 1e-12);
}

TEST_CASE("lemma-8 dominates the exact discrepancy") {
  SeedStream rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int q = 1 + static_cast<int>(rng.next_below(3));
    Kernel f = random_mirror_unit(p, 3, 0.75, rng.next_u64());
    Kernel g = random_mirror_unit(q, 3, 0.75, rng.next_u64());
    const double a = 2.0 * rng.next_unit() - 1.0;
    const double lhs = gamma_discrepancy_sq(f, g, a);
    const double rhs = lemma8_rhs(f, g, a);
    CHECK(lhs <= rhs + 1e-9 * (1 + rhs));
  }
}

TEST_CASE("psi") {
  const double x1[] = {0.0, 0.0};
  const double y1[] = {1.0, 2.0};
  const int q1[] = {2, 3};
  CHECK(psi(x1, y1, q1) == 0.0);

  const double x2[] = {1.0};
  const double y2[] = {1.0};
  const int q2[] = {2};
  CHECK(psi(x2, y2, q2) == doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-14));

  const double xg[] = {0.7};
  const double yg[] = {0.9};
  const int qg[] = {3};
  CHECK(psi(xg, yg, qg) ==
        doctest::Approx(std::pow(3.0, 0.75) * std::pow(0.7, 0.25) * std::sqrt(0.9)));

  const double bady[] = {-1.0};
  CHECK_THROWS_AS(psi(x2, bady, q2), std::invalid_argument);
}

TEST_CASE("bound pipeline on the rank-one example") {
  Kernel e2 = e_tensor_e();
  WignerVector v = WignerVector::from_components({{2, e2}});
  const double m = m_of_f(v);
  CHECK(m == doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-12));

  const SpdCovariance c = SpdCovariance::analyze(v.gram());
  const DwBounds b = dw_bounds(v, c);
  CHECK(b.stein_upper * b.stein_upper == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(b.thm8 == doctest::Approx(m));
  CHECK(b.lemma == doctest::Approx(b.stein_upper));

  BoundReport rep = bound_report(v);
  CHECK(rep.m_of_f == doctest::Approx(m));
  CHECK(rep.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.y[0] == doctest::Approx(1.0));
  CHECK(rep.hsi_rhs <= rep.lsi_rhs);
}

TEST_CASE("bound pipeline scaling homogeneity") {
  // scaling kernels by lam scales y by lam^2, x by lam^4 and M by lam^2
  Kernel f = random_mirror_unit(2, 3, 0.5, 8);
  Kernel g = random_mirror_unit(3, 3, 0.5, 9);
  WignerVector v = WignerVector::from_components({{2, f}, {3, g}});
  const double base = m_of_f(v);
  const double lam = 1.7;
  Kernel fs = f;
  fs *= Complex(lam);
  Kernel gs = g;
  gs *= Complex(lam);
  WignerVector vs = WignerVector::from_components({{2, fs}, {3, gs}});
  CHECK(m_of_f(vs) == doctest::Approx(lam * lam * base).epsilon(1e-10));
}

TEST_CASE("fisher decay bound") {
  Eigen::MatrixXd c(2, 2);
  c << 2.0, 0.4, 0.4, 1.0;
  const SpdCovariance spd = SpdCovariance::analyze(c);
  CHECK(fisher_decay_bound(1.0, 0.0, spd) == 0.0);
  double prev = fisher_decay_bound(0.05, 1.0, spd);
  for (double t = 0.1; t < 4.0; t += 0.05) {
    const double v = fisher_decay_bound(t, 1.0, spd);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(fisher_decay_bound(0.0, 1.0, spd), std::domain_error);
  CHECK_THROWS_AS(fisher_decay_bound(-1.0, 1.0, spd), std::domain_error);
}

TEST_CASE("hsi and lsi right-hand sides") {
  Eigen::MatrixXd c(2, 2);
  c << 3.0, 0.5, 0.5, 1.0;
  const SpdCovariance spd = SpdCovariance::analyze(c);
  CHECK(hsi_rhs(0.0, 2.0, spd) == 0.0);
  SeedStream rng(66);
  for (int i = 0; i < 100; ++i) {
    const double sigma = 2 * rng.next_unit();
    const double phi = 4 * rng.next_unit();
    CHECK(hsi_rhs(sigma, phi, spd) <= lsi_rhs(phi, spd) * (1 + 1e-12) + 1e-15);
  }
  // homothetic covariance: condition number one
  const SpdCovariance hom = SpdCovariance::analyze(0.5 * Eigen::MatrixXd::Identity(3, 3));
  const double sigma = 1.2, phi = 0.8;
  const double expect = 0.5 * 0.5 * 2.0 * sigma * sigma * std::log1p(phi / (2.0 * sigma * sigma));
  CHECK(hsi_rhs(sigma, phi, hom) == doctest::Approx(expect).epsilon(1e-13));
  CHECK_THROWS_AS(hsi_rhs(-1.0, 1.0, spd), std::invalid_argument);
}

TEST_CASE("xi-q discrepancy") {
  CHECK(xi_q_discrepancy(0.0, 5) == 0.0);
  CHECK(xi_q_discrepancy(0.1, 4) == doctest::Approx(0.4 / std::sqrt(0.96)).epsilon(1e-14));
  double series = 0.0;
  for (int k = 1; k <= 50; ++k) series += std::pow(0.2 * 0.2 * 3, k);
  CHECK(xi_q_hs_norm_sq(0.2, 3) == doctest::Approx(series).epsilon(1e-10));
  CHECK_THROWS_AS(xi_q_discrepancy(0.6, 3), std::domain_error);
  CHECK_THROWS_AS(xi_q_hs_norm_sq(1.0, 1), std::domain_error);
}

TEST_CASE("semicircular entropy") {
  CHECK(semicircular_entropy(2, 1.0) ==
        doctest::Approx(std::log(2.0 * std::numbers::pi_v<double> * std::exp(1.0))));
  const double rho = 0.7;
  CHECK(semicircular_entropy(3, rho) - semicircular_entropy(3, 1.0) ==
        doctest::Approx(-1.5 * std::log(rho)));
  CHECK(semicircular_entropy(6, rho) == doctest::Approx(2 * semicircular_entropy(3, rho)));
  CHECK_THROWS_AS(semicircular_entropy(1, 0.0), std::invalid_argument);
}
