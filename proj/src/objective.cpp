#include "sphinpaint/objective.hpp"

#include <algorithm>
#include <cmath>

namespace sphinpaint {

namespace {

void check_dims(const CVec& alpha, const DiscreteModel& model) {
  if (alpha.size() != model.dim())
    throw ConfigError("coefficient vector dimension " + std::to_string(alpha.size()) +
                      " does not match model dimension " + std::to_string(model.dim()));
}

}  // namespace

ModelEval eval_model(const CVec& alpha, const DiscreteModel& model) {
  check_dims(alpha, model);
  ModelEval ev;
  ev.residual.noalias() = model.gram * alpha;
  // alpha^H gram alpha - 2 Re(alpha^H rhs) from the same product.
  ev.g = ev.residual.dot(alpha).real() - 2.0 * model.rhs.dot(alpha).real() + model.c - model.rho;
  ev.residual -= model.rhs;
  return ev;
}

double phi_value(const CVec& flat, const DegreeWeights& weights) {
  const int L = static_cast<int>(weights.values.size()) - 1;
  if (flat.size() != coeff_dim(L))
    throw ConfigError("coefficient vector does not match the degree-weight band limit");
  double value = 0.0;
  for (int l = 0; l <= L; ++l)
    value += weights.values[l] * std::pow(flat.segment(l * l, 2 * l + 1).norm(), weights.p);
  return value;
}

double phi_value(const CoefficientVector& alpha, const DegreeWeights& weights) {
  if (static_cast<int>(weights.values.size()) != alpha.band_limit() + 1)
    throw ConfigError("degree weights do not cover the coefficient band limit");
  return phi_value(alpha.flat(), weights);
}

double constraint_g(const CoefficientVector& alpha, const DiscreteModel& model) {
  return eval_model(alpha.flat(), model).g;
}

double penalty_value(const CoefficientVector& alpha, const DiscreteModel& model, double lambda) {
  return phi_value(alpha, model.weights) + lambda * std::max(constraint_g(alpha, model), 0.0);
}

double psi(double s, const SmoothingParams& params) {
  if (params.mu <= 0.0) throw ConfigError("smoothing parameter mu must be positive");
  if (s < 0.0) return 0.0;
  if (s <= params.mu) return params.lambda * s * s / (2.0 * params.mu);
  return params.lambda * s - params.lambda * params.mu / 2.0;
}

double psi_prime(double s, const SmoothingParams& params) {
  if (params.mu <= 0.0) throw ConfigError("smoothing parameter mu must be positive");
  const double t = std::clamp(s / params.mu, 0.0, 1.0);
  return params.lambda * t;
}

double smooth_penalty(const CoefficientVector& alpha, const DiscreteModel& model,
                      const SmoothingParams& params) {
  return psi(constraint_g(alpha, model), params);
}

CVec smooth_penalty_grad(const ModelEval& eval, const SmoothingParams& params) {
  const double slope = psi_prime(eval.g, params);
  if (slope == 0.0) return CVec::Zero(eval.residual.size());
  return slope * eval.residual;
}

CVec smooth_penalty_grad(const CoefficientVector& alpha, const DiscreteModel& model,
                         const SmoothingParams& params) {
  return smooth_penalty_grad(eval_model(alpha.flat(), model), params);
}

CVec phi_grad_nonzero(const CVec& flat, const DegreeWeights& weights) {
  const int L = static_cast<int>(weights.values.size()) - 1;
  if (flat.size() != coeff_dim(L))
    throw ConfigError("coefficient vector does not match the degree-weight band limit");
  CVec grad = CVec::Zero(flat.size());
  const double zero_tol = 1e-12 * (1.0 + flat.norm());
  for (int l = 0; l <= L; ++l) {
    const auto group = flat.segment(l * l, 2 * l + 1);
    const double r = group.norm();
    if (r <= zero_tol) continue;
    const double scale = 0.5 * weights.p * weights.values[l] * std::pow(r, weights.p - 2.0);
    grad.segment(l * l, 2 * l + 1) = scale * group;
  }
  return grad;
}

CVec phi_grad_nonzero(const CoefficientVector& alpha, const DegreeWeights& weights) {
  if (static_cast<int>(weights.values.size()) != alpha.band_limit() + 1)
    throw ConfigError("degree weights do not cover the coefficient band limit");
  return phi_grad_nonzero(alpha.flat(), weights);
}

}  // namespace sphinpaint
