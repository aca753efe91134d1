#include <doctest.h>

#include <cmath>
#include <random>

#include "sphinpaint/harmonics.hpp"
#include "sphinpaint/types.hpp"
#include "test_support.hpp"

using namespace sphinpaint;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("flat index layout is the degree-major bijection") {
  CHECK(flat_index(0, 0) == 0);
  CHECK(flat_index(1, -1) == 1);
  CHECK(flat_index(1, 0) == 2);
  CHECK(flat_index(1, 1) == 3);
  CHECK(flat_index(2, -2) == 4);
  int expect = 0;
  for (int l = 0; l <= 12; ++l)
    for (int m = -l; m <= l; ++m) CHECK(flat_index(l, m) == expect++);
  CHECK(coeff_dim(12) == expect);
  CHECK(coeff_dim(0) == 1);
  CHECK(coeff_dim(35) == 1296);
}

TEST_CASE("coefficient vector validates its indices") {
  CoefficientVector alpha(3);
  CHECK(alpha.dim() == 16);
  alpha.at(2, -1) = Complex(1.5, -2.0);
  CHECK(alpha.flat()(flat_index(2, -1)) == Complex(1.5, -2.0));
  CHECK(alpha.group(2).size() == 5);
  CHECK(alpha.group_norm(2) == doctest::Approx(2.5));
  CHECK_THROWS_AS(alpha.at(4, 0), ConfigError);
  CHECK_THROWS_AS(alpha.at(2, 3), ConfigError);
  CHECK_THROWS_AS(CoefficientVector(-1), ConfigError);
  CHECK_THROWS_AS(CoefficientVector(2, CVec::Zero(5)), ConfigError);
}

TEST_CASE("Gauss-Legendre closed forms for one and two nodes") {
  const QuadratureRule one = gauss_legendre_rule(1);
  REQUIRE(one.nodes.size() == 1);
  CHECK(one.nodes[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(one.weights[0] == doctest::Approx(2.0).epsilon(1e-14));

  const QuadratureRule two = gauss_legendre_rule(2);
  REQUIRE(two.nodes.size() == 2);
  CHECK(two.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(two.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(two.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(two.weights[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre weights sum to 2 with ascending interior nodes") {
  for (int n : {1, 2, 3, 5, 8, 20, 53}) {
    const QuadratureRule rule = gauss_legendre_rule(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += rule.weights[i];
      CHECK(rule.weights[i] > 0.0);
      CHECK(rule.nodes[i] > -1.0);
      CHECK(rule.nodes[i] < 1.0);
      if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gauss_legendre_rule(0), ConfigError);
}

TEST_CASE("Gauss-Legendre integrates monomials of degree <= 2n-1 exactly") {
  for (int n : {1, 2, 3, 4, 6}) {
    const QuadratureRule rule = gauss_legendre_rule(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double quad = 0.0;
      for (int i = 0; i < n; ++i) quad += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
      CHECK(quad == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("low-degree harmonics match their analytic forms") {
  const double c00 = 1.0 / std::sqrt(4.0 * kPi);
  const double c10 = std::sqrt(3.0 / (4.0 * kPi));
  const double c11 = std::sqrt(3.0 / (8.0 * kPi));
  const double c21 = std::sqrt(15.0 / (8.0 * kPi));
  const double c22 = 0.25 * std::sqrt(15.0 / (2.0 * kPi));

  for (double theta : {0.3, 1.1, 2.4}) {
    for (double phi : {0.0, 0.7, 4.9}) {
      const Complex e1 = std::polar(1.0, phi);
      const Complex e2 = std::polar(1.0, 2.0 * phi);
      const double st = std::sin(theta), ct = std::cos(theta);
      CHECK(std::abs(eval_ylm({0, 0}, theta, phi) - Complex(c00)) < 1e-12);
      CHECK(std::abs(eval_ylm({1, 0}, theta, phi) - Complex(c10 * ct)) < 1e-12);
      CHECK(std::abs(eval_ylm({1, 1}, theta, phi) - (-c11 * st) * e1) < 1e-12);
      CHECK(std::abs(eval_ylm({1, -1}, theta, phi) - (c11 * st) * std::conj(e1)) < 1e-12);
      CHECK(std::abs(eval_ylm({2, 1}, theta, phi) - (-c21 * st * ct) * e1) < 1e-12);
      CHECK(std::abs(eval_ylm({2, 2}, theta, phi) - (c22 * st * st) * e2) < 1e-12);
    }
  }
}

TEST_CASE("negative orders obey Y_{l,-m} = (-1)^m conj(Y_{l,m})") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> utheta(0.05, kPi - 0.05), uphi(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 25; ++trial) {
    const double theta = utheta(rng), phi = uphi(rng);
    for (int l : {1, 2, 5, 11, 20}) {
      for (int m = 1; m <= l; ++m) {
        const Complex pos = eval_ylm({l, m}, theta, phi);
        const Complex neg = eval_ylm({l, -m}, theta, phi);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(neg - sign * std::conj(pos)) < 1e-12 * (1.0 + std::abs(pos)));
      }
    }
  }
}

TEST_CASE("point and row evaluators agree with the scalar harmonic") {
  const int L = 9;
  CVec flat;
  const double theta = 1.234, phi = 2.345;
  ylm_point(L, theta, phi, flat);
  REQUIRE(flat.size() == coeff_dim(L));
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m)
      CHECK(std::abs(flat(flat_index(l, m)) - eval_ylm({l, m}, theta, phi)) < 1e-13);

  const std::vector<double> phis{0.1, 1.9, 5.5};
  CMat rows;
  ylm_theta_rows(L, theta, phis, rows);
  REQUIRE(rows.rows() == 3);
  REQUIRE(rows.cols() == coeff_dim(L));
  for (int i = 0; i < 3; ++i) {
    ylm_point(L, theta, phis[i], flat);
    CHECK((rows.row(i).transpose() - flat).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("full-sphere quadrature reproduces orthonormality") {
  const int L = 5;
  const SphereGrid grid = build_grid(L);
  const int d = coeff_dim(L);
  CMat gram = CMat::Zero(d, d);
  CVec row;
  for (int j = 0; j < grid.n_nodes(); ++j) {
    ylm_point(L, grid.theta(j), grid.phi(j), row);
    gram.noalias() += grid.weights(j) * row.conjugate() * row.transpose();
  }
  CHECK((gram - CMat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("analyze inverts synthesize for band-limited fields") {
  const int L = 10;
  const SphereGrid grid = build_grid(L);
  const CoefficientVector alpha = testing::random_real_field_coeffs(L, 42);
  const CVec field = synthesize(alpha, grid);

  // Conjugate-symmetric coefficients give a real field.
  CHECK(field.imag().cwiseAbs().maxCoeff() < 1e-10 * field.real().cwiseAbs().maxCoeff());

  const CoefficientVector back = analyze(field, grid, L);
  CHECK((back.flat() - alpha.flat()).cwiseAbs().maxCoeff() < 1e-10);

  // Parseval: quadrature energy equals the coefficient energy.
  double energy = 0.0;
  for (int j = 0; j < grid.n_nodes(); ++j) energy += grid.weights(j) * std::norm(field(j));
  CHECK(energy == doctest::Approx(alpha.flat().squaredNorm()).epsilon(1e-8));
}

TEST_CASE("analyze of an arbitrary complex coefficient field also round-trips") {
  const int L = 6;
  const SphereGrid grid = build_grid(L);
  const CoefficientVector alpha = testing::random_coeffs(L, 1234);
  const CoefficientVector back = analyze(synthesize(alpha, grid), grid, L);
  CHECK((back.flat() - alpha.flat()).cwiseAbs().maxCoeff() < 1e-10);
}
