#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "sphinpaint/objective.hpp"
#include "sphinpaint/types.hpp"
#include "test_support.hpp"

using namespace sphinpaint;

namespace {

// Dense grid over t in [0,1] for the variational definition
// psi(s) = lambda * max_{0<=t<=1} (s t - mu t^2 / 2).
double psi_grid_oracle(double s, double lambda, double mu) {
  double best = 0.0;
  const int n = 100000;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    best = std::max(best, s * t - 0.5 * mu * t * t);
  }
  return lambda * best;
}

// Central finite difference of f_{lambda,mu} in one real coordinate.
double fd_coordinate(const CoefficientVector& alpha, const DiscreteModel& model,
                     const SmoothingParams& params, int k, bool imag_part, double h) {
  CVec plus = alpha.flat();
  CVec minus = alpha.flat();
  const Complex step = imag_part ? Complex(0.0, h) : Complex(h, 0.0);
  plus(k) += step;
  minus(k) -= step;
  const int L = alpha.band_limit();
  const double fp = smooth_penalty(CoefficientVector(L, plus), model, params);
  const double fm = smooth_penalty(CoefficientVector(L, minus), model, params);
  return (fp - fm) / (2.0 * h);
}

}  // namespace

TEST_CASE("phi matches hand-computed group values") {
  const DegreeWeights weights = DegreeWeights::make(2, 0.5, 1.0001);
  CoefficientVector zero(2);
  CHECK(phi_value(zero, weights) == 0.0);

  CoefficientVector only_monopole(2);
  only_monopole.at(0, 0) = Complex(4.0, 0.0);
  CHECK(phi_value(only_monopole, weights) == doctest::Approx(2.0).epsilon(1e-12));

  // Single l=2 group of norm 9: beta_2 = eta^2 * 2^p.
  CoefficientVector quad(2);
  quad.at(2, 0) = Complex(9.0, 0.0);
  const double expected = 1.0001 * 1.0001 * std::sqrt(2.0) * 3.0;
  CHECK(phi_value(quad, weights) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(4.2435).epsilon(1e-4));

  // Flat overload agrees with the grouped one.
  const CoefficientVector alpha = testing::random_coeffs(2, 11);
  CHECK(phi_value(alpha.flat(), weights) == phi_value(alpha, weights));
}

TEST_CASE("phi is p-homogeneous and depends only on group norms") {
  const int L = 5;
  const double p = 0.37;
  const DegreeWeights weights = DegreeWeights::make(L, p, 1.0001);
  const CoefficientVector alpha = testing::random_coeffs(L, 12);
  const double base = phi_value(alpha, weights);

  for (double t : {0.25, 2.0, 17.0}) {
    CoefficientVector scaled(L, t * alpha.flat());
    CHECK(phi_value(scaled, weights) ==
          doctest::Approx(std::pow(t, p) * base).epsilon(1e-12));
  }

  // Unitary mix inside group l=3 leaves every group norm unchanged.
  CoefficientVector mixed = alpha;
  Eigen::HouseholderQR<CMat> qr(testing::random_gram(7, 77));
  const CMat q = qr.householderQ();
  mixed.group(3) = q * alpha.group(3);
  CHECK(phi_value(mixed, weights) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("constraint g hits its closed-form values") {
  const int L = 4;
  const CoefficientVector b = testing::random_coeffs(L, 13);
  const double rho = 0.3;
  const DiscreteModel model = testing::identity_model(b, rho);

  CoefficientVector zero(L);
  CHECK(constraint_g(zero, model) == doctest::Approx(model.c - rho).epsilon(1e-12));

  // Identity Gram: the unconstrained minimizer of g is b itself.
  const double min_value = model.c - rho - b.flat().squaredNorm();
  CHECK(constraint_g(b, model) == doctest::Approx(min_value).epsilon(1e-10));

  // General Hermitian Gram: minimizer gram^{-1} rhs, value c - rho - rhs^H gram^{-1} rhs.
  DiscreteModel dense = model;
  dense.gram = testing::random_gram(model.dim(), 14);
  const CVec minimizer = dense.gram.ldlt().solve(dense.rhs);
  const double dense_min = dense.c - rho - dense.rhs.dot(minimizer).real();
  CHECK(constraint_g(CoefficientVector(L, minimizer), dense) ==
        doctest::Approx(dense_min).epsilon(1e-10));

  const ModelEval ev = eval_model(minimizer, dense);
  CHECK(ev.g == doctest::Approx(dense_min).epsilon(1e-10));
  CHECK((ev.residual - (dense.gram * minimizer - dense.rhs)).norm() <= 1e-12);
}

TEST_CASE("exact penalty adds lambda times the constraint violation") {
  const int L = 3;
  const CoefficientVector b = testing::random_coeffs(L, 15);
  const DiscreteModel model = testing::identity_model(b, 0.5);

  // Feasible point: alpha = b gives g = -rho < 0, so F = Phi.
  CHECK(penalty_value(b, model, 3.0) == doctest::Approx(phi_value(b, model.weights)).epsilon(1e-12));

  // alpha = 0: F = lambda (c - rho).
  CoefficientVector zero(L);
  CHECK(penalty_value(zero, model, 3.0) ==
        doctest::Approx(3.0 * (model.c - model.rho)).epsilon(1e-12));

  // Crafted infeasible point with g = 2 exactly: alpha = b + t e, t^2 = rho + 2.
  CoefficientVector shifted = b;
  shifted.at(0, 0) += Complex(std::sqrt(model.rho + 2.0), 0.0);
  CHECK(constraint_g(shifted, model) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(penalty_value(shifted, model, 3.0) ==
        doctest::Approx(phi_value(shifted, model.weights) + 6.0).epsilon(1e-12));
}

TEST_CASE("psi matches its piecewise closed form and the variational oracle") {
  const SmoothingParams params{2.0, 1.0};
  CHECK(psi(-1.0, params) == 0.0);
  CHECK(psi(0.0, params) == 0.0);
  CHECK(psi(0.5, params) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(psi(3.0, params) == doctest::Approx(5.0).epsilon(1e-14));

  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> s_draw(-2.0, 4.0);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int i = 0; i < 25; ++i) {
    const SmoothingParams rp{pos(rng), pos(rng)};
    const double s = s_draw(rng);
    CHECK(psi(s, rp) == doctest::Approx(psi_grid_oracle(s, rp.lambda, rp.mu)).epsilon(1e-6));
  }
}

TEST_CASE("psi is continuous at both kinks and below the exact penalty") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int i = 0; i < 50; ++i) {
    const SmoothingParams params{pos(rng), pos(rng)};
    const double mu = params.mu;
    // Branch agreement at s = 0 and s = mu.
    CHECK(psi(0.0, params) == 0.0);
    CHECK(psi(mu, params) == doctest::Approx(params.lambda * mu / 2.0).epsilon(1e-13));
    CHECK(psi(mu * (1.0 + 1e-12), params) == doctest::Approx(psi(mu, params)).epsilon(1e-10));

    std::uniform_real_distribution<double> s_draw(-2.0, 4.0);
    double prev = psi(-2.0, params);
    for (double s = -1.9; s <= 4.0; s += 0.1) {
      const double cur = psi(s, params);
      CHECK(cur >= prev);  // monotone
      prev = cur;
    }
    for (int k = 0; k < 40; ++k) {
      const double s = s_draw(rng);
      CHECK(psi(s, params) <= params.lambda * std::max(s, 0.0) + 1e-15);
      // Midpoint convexity.
      const double s2 = s_draw(rng);
      CHECK(psi(0.5 * (s + s2), params) <= 0.5 * (psi(s, params) + psi(s2, params)) + 1e-12);
    }
  }
}

TEST_CASE("psi_prime is the clamped slope with Lipschitz constant lambda over mu") {
  const SmoothingParams params{2.0, 0.5};
  CHECK(psi_prime(-3.0, params) == 0.0);
  CHECK(psi_prime(0.0, params) == 0.0);
  CHECK(psi_prime(0.25, params) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(psi_prime(0.5, params) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(psi_prime(9.0, params) == doctest::Approx(2.0).epsilon(1e-14));

  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> s_draw(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double s1 = s_draw(rng);
    const double s2 = s_draw(rng);
    const double rate = params.lambda / params.mu;
    CHECK(std::fabs(psi_prime(s1, params) - psi_prime(s2, params)) <=
          rate * std::fabs(s1 - s2) + 1e-14);
  }
}

TEST_CASE("smoothed penalty obeys the sandwich inequality") {
  const int L = 4;
  const CoefficientVector b = testing::random_coeffs(L, 19);
  const DiscreteModel model = testing::identity_model(b, 0.4);

  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  std::uniform_real_distribution<double> pos(0.05, 4.0);
  for (int i = 0; i < 1000; ++i) {
    CVec flat(model.dim());
    for (int k = 0; k < model.dim(); ++k) flat(k) = Complex(coef(rng), coef(rng));
    const CoefficientVector alpha(L, flat);
    const SmoothingParams params{pos(rng), pos(rng)};
    const double exact = params.lambda * std::max(constraint_g(alpha, model), 0.0);
    const double smooth = smooth_penalty(alpha, model, params);
    const double gap = exact - smooth;
    // The upper bound is attained on the whole branch g >= mu, so the rounding
    // of lambda*g - (lambda*g - lambda*mu/2) leaves the gap off by a few ulps
    // of lambda*g; the slack scales with that magnitude, not with the bound.
    const double bound = params.lambda * params.mu / 2.0;
    const double slack = 1e-12 * (1.0 + exact);
    CHECK(gap >= -slack);
    CHECK(gap <= bound + slack);
  }

  // Strictly feasible alpha: the smoothed penalty vanishes.
  const SmoothingParams params{2.0, 1.0};
  CHECK(smooth_penalty(b, model, params) == 0.0);
}

TEST_CASE("smoothed gradient matches the branch formulas") {
  const int L = 4;
  const CoefficientVector b = testing::random_coeffs(L, 21);
  DiscreteModel model = testing::identity_model(b, 0.4);
  model.gram = testing::random_gram(model.dim(), 22);

  // Strictly feasible: zero vector.
  const CVec feas_min = model.gram.ldlt().solve(model.rhs);
  if (constraint_g(CoefficientVector(L, feas_min), model) < 0.0) {
    const CVec grad = smooth_penalty_grad(CoefficientVector(L, feas_min), model,
                                          SmoothingParams{2.0, 1.0});
    CHECK(grad.norm() == 0.0);
  }

  // Far outside: g >= mu, gradient = lambda * residual.
  CoefficientVector far(L, 10.0 * b.flat());
  const SmoothingParams params{2.0, 1.0};
  REQUIRE(constraint_g(far, model) >= params.mu);
  const CVec grad_far = smooth_penalty_grad(far, model, params);
  const CVec expected = params.lambda * (model.gram * far.flat() - model.rhs);
  CHECK((grad_far - expected).norm() <= 1e-12 * expected.norm());

  // Both overloads agree.
  const ModelEval ev = eval_model(far.flat(), model);
  CHECK((smooth_penalty_grad(ev, params) - grad_far).norm() == 0.0);
}

TEST_CASE("smoothed gradient agrees with central finite differences") {
  const int L = 3;
  const CoefficientVector b = testing::random_coeffs(L, 23);
  DiscreteModel model = testing::identity_model(b, 0.4);
  model.gram = testing::random_gram(model.dim(), 24);

  // Bisect a scaling of b so that g lands mid-branch: g decreases from
  // c - rho > mu at t = 0 toward its negative minimum, crossing mu/2 once.
  const SmoothingParams params{1.7, 2.0};
  double lo = 0.0, hi = 1.0;
  REQUIRE(constraint_g(CoefficientVector(L, hi * b.flat()), model) < 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (constraint_g(CoefficientVector(L, mid * b.flat()), model) > 0.5 * params.mu)
      lo = mid;
    else
      hi = mid;
  }
  const CoefficientVector alpha(L, 0.5 * (lo + hi) * b.flat());
  const double g = constraint_g(alpha, model);
  REQUIRE(g > 1e-3);
  REQUIRE(g < params.mu - 1e-3);

  const CVec grad = smooth_penalty_grad(alpha, model, params);
  const double h = 1e-6;
  for (int k = 0; k < std::min(8, model.dim()); ++k) {
    const double fd_re = fd_coordinate(alpha, model, params, k, false, h);
    const double fd_im = fd_coordinate(alpha, model, params, k, true, h);
    CHECK(fd_re == doctest::Approx(2.0 * grad(k).real()).epsilon(1e-6));
    CHECK(fd_im == doctest::Approx(2.0 * grad(k).imag()).epsilon(1e-6));
  }
}

TEST_CASE("phi gradient on nonzero groups follows the power formula") {
  const DegreeWeights weights = DegreeWeights::make(1, 0.5, 1.0001);
  CoefficientVector alpha(1);
  alpha.at(0, 0) = Complex(4.0, 0.0);
  const CVec grad = phi_grad_nonzero(alpha, weights);
  CHECK(grad(0).real() == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(grad(0).imag() == 0.0);
  // Zero group (l=1) contributes nothing.
  CHECK(grad.tail(3).norm() == 0.0);

  CHECK(phi_grad_nonzero(CoefficientVector(1), weights).norm() == 0.0);
}

TEST_CASE("phi gradient matches finite differences away from zero groups") {
  const int L = 3;
  const double p = 0.6;
  const DegreeWeights weights = DegreeWeights::make(L, p, 1.0001);
  const CoefficientVector alpha = testing::random_coeffs(L, 25);
  const CVec grad = phi_grad_nonzero(alpha, weights);

  const double h = 1e-6;
  for (int k : {0, 3, 7, 12}) {
    CVec plus = alpha.flat(), minus = alpha.flat();
    plus(k) += Complex(h, 0.0);
    minus(k) -= Complex(h, 0.0);
    const double fd = (phi_value(plus, weights) - phi_value(minus, weights)) / (2.0 * h);
    CHECK(fd == doctest::Approx(2.0 * grad(k).real()).epsilon(1e-6));

    plus = alpha.flat();
    minus = alpha.flat();
    plus(k) += Complex(0.0, h);
    minus(k) -= Complex(0.0, h);
    const double fd_im = (phi_value(plus, weights) - phi_value(minus, weights)) / (2.0 * h);
    CHECK(fd_im == doctest::Approx(2.0 * grad(k).imag()).epsilon(1e-6));
  }
}
