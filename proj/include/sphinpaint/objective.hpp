#pragma once

#include "sphinpaint/model.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Penalty / smoothing parameter pair (lambda, mu).
struct SmoothingParams {
  double lambda = 20.0;
  double mu = 1.0;
};

// Cached per-iterate model quantities: residual = gram*alpha - rhs and the
// constraint value g(alpha), both from a single matrix-vector product.
struct ModelEval {
  CVec residual;
  double g = 0.0;
};

ModelEval eval_model(const CVec& alpha, const DiscreteModel& model);

// Group penalty Phi(alpha) = sum_l beta_l ||alpha_{l.}||^p.
double phi_value(const CoefficientVector& alpha, const DegreeWeights& weights);
double phi_value(const CVec& flat, const DegreeWeights& weights);

// Constraint g(alpha) = alpha^H gram alpha - 2 Re(alpha^H rhs) + c - rho.
double constraint_g(const CoefficientVector& alpha, const DiscreteModel& model);

// Exact penalty F_lambda(alpha) = Phi(alpha) + lambda * max(g(alpha), 0).
double penalty_value(const CoefficientVector& alpha, const DiscreteModel& model, double lambda);

// Smoothing of lambda * max(s, 0):
//   psi(s) = 0 for s <= 0, lambda s^2 / (2 mu) for 0 <= s <= mu,
//   lambda s - lambda mu / 2 for s >= mu.  (Middle branch at both kinks.)
double psi(double s, const SmoothingParams& params);

// psi'(s) = lambda * clamp(s / mu, 0, 1); Lipschitz with constant lambda / mu.
double psi_prime(double s, const SmoothingParams& params);

// Smoothed constraint penalty f_{lambda,mu}(alpha) = psi(g(alpha)).
double smooth_penalty(const CoefficientVector& alpha, const DiscreteModel& model,
                      const SmoothingParams& params);

// Conjugate (Wirtinger) gradient d f / d conj(alpha) = psi'(g) * residual.
// The real-variable gradient is twice the (Re, Im) parts of this vector.
CVec smooth_penalty_grad(const CoefficientVector& alpha, const DiscreteModel& model,
                         const SmoothingParams& params);
CVec smooth_penalty_grad(const ModelEval& eval, const SmoothingParams& params);

// Conjugate gradient of Phi on nonzero groups: (p/2) beta_l ||alpha_{l.}||^{p-2}
// alpha_{l.}; groups with ||alpha_{l.}|| <= 1e-12 (1 + ||alpha||) contribute 0.
CVec phi_grad_nonzero(const CoefficientVector& alpha, const DegreeWeights& weights);
CVec phi_grad_nonzero(const CVec& flat, const DegreeWeights& weights);

}  // namespace sphinpaint
