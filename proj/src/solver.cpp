#include "sphinpaint/solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <deque>

#include "sphinpaint/prox.hpp"

namespace sphinpaint {

namespace {

void validate(const NpgConfig& cfg) {
  if (!(cfg.M_min >= 1.0) || !(cfg.M_max >= cfg.M_min))
    throw ConfigError("NPG curvature bounds need 1 <= M_min <= M_max");
  if (!(cfg.backtrack_growth > 1.0)) throw ConfigError("backtracking growth must exceed 1");
  if (!(cfg.decrease_const > 0.0)) throw ConfigError("decrease constant must be positive");
  if (cfg.history < 0) throw ConfigError("nonmonotone window must be nonnegative");
  if (cfg.max_inner_iterations < 1) throw ConfigError("inner iteration cap must be positive");
}

void validate(const PenaltyConfig& cfg) {
  if (!(cfg.lambda0 > 0.0) || !(cfg.mu0 > 0.0) || !(cfg.eps0 > 0.0))
    throw ConfigError("penalty parameters lambda0, mu0, eps0 must be positive");
  if (!(cfg.sigma1 > 1.0)) throw ConfigError("lambda growth sigma1 must exceed 1");
  if (!(cfg.sigma2 > 0.0 && cfg.sigma2 < 1.0)) throw ConfigError("sigma2 must lie in (0, 1)");
  if (!(cfg.eps_floor > 0.0) || !(cfg.outer_tol > 0.0))
    throw ConfigError("eps floor and outer tolerance must be positive");
  if (cfg.max_outer_iterations < 1) throw ConfigError("outer iteration cap must be positive");
  if (cfg.max_residual_retries < 0) throw ConfigError("residual retry count must be nonnegative");
}

// Groupwise prox of Phi around z = alpha - grad / M.
CVec prox_step(const CVec& alpha, const CVec& grad, double M, const DegreeWeights& weights) {
  const int L = static_cast<int>(weights.values.size()) - 1;
  CVec y(alpha.size());
  for (int l = 0; l <= L; ++l) {
    const int off = l * l, len = 2 * l + 1;
    const CVec z = alpha.segment(off, len) - grad.segment(off, len) / M;
    y.segment(off, len) = group_prox(z, weights.values[l], weights.p, M);
  }
  return y;
}

// Per-group scaled stationarity residuals against the smooth gradient.
double max_group_residual(const CVec& alpha, const CVec& smooth_grad,
                          const DegreeWeights& weights) {
  const int L = static_cast<int>(weights.values.size()) - 1;
  const double p = weights.p;
  double worst = 0.0;
  for (int l = 0; l <= L; ++l) {
    const int off = l * l, len = 2 * l + 1;
    const auto group = alpha.segment(off, len);
    const double r = group.norm();
    if (r == 0.0) continue;
    const double res = (p * weights.values[l] * std::pow(r, p) * group +
                        2.0 * r * r * smooth_grad.segment(off, len))
                           .norm();
    worst = std::max(worst, res);
  }
  return worst;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::outer_cap: return "outer_cap";
    case SolveStatus::inner_flagged: return "inner_flagged";
  }
  return "?";
}

double bb_init(const CVec& alpha_prev, const CVec& alpha_cur, const CVec& grad_prev,
               const CVec& grad_cur, const NpgConfig& config) {
  validate(config);
  const CVec ds = alpha_cur - alpha_prev;
  const double denom = ds.squaredNorm();
  if (denom == 0.0) return config.M_min;
  const double curvature = std::abs(ds.dot(grad_cur - grad_prev)) / denom;
  return std::min(std::max(curvature, config.M_min), config.M_max);
}

CoefficientVector npg_step(const CoefficientVector& alpha, const DiscreteModel& model,
                           const SmoothingParams& params, double M) {
  if (alpha.band_limit() != model.band_limit)
    throw ConfigError("coefficient band limit does not match the model");
  if (!(M > 0.0)) throw ConfigError("prox curvature M must be positive");
  const ModelEval ev = eval_model(alpha.flat(), model);
  const CVec grad = smooth_penalty_grad(ev, params);
  return CoefficientVector(model.band_limit, prox_step(alpha.flat(), grad, M, model.weights));
}

bool residual_ok(const CoefficientVector& alpha, const DiscreteModel& model,
                 const SmoothingParams& params, double eps) {
  if (alpha.band_limit() != model.band_limit)
    throw ConfigError("coefficient band limit does not match the model");
  const ModelEval ev = eval_model(alpha.flat(), model);
  const CVec grad = smooth_penalty_grad(ev, params);
  return max_group_residual(alpha.flat(), grad, model.weights) <= eps;
}

NpgResult npg_solve(const DiscreteModel& model, const SmoothingParams& params,
                    const CoefficientVector& init, double eps_k, const NpgConfig& config,
                    double displacement_tol, double residual_eps, int max_resumptions,
                    bool residual_terminate) {
  validate(config);
  if (init.band_limit() != model.band_limit)
    throw ConfigError("coefficient band limit does not match the model");
  if (!(eps_k > 0.0)) throw ConfigError("NPG stage tolerance eps_k must be positive");
  double disp_tol = displacement_tol > 0.0 ? displacement_tol : std::sqrt(eps_k);
  const double obj_tol = std::min(std::pow(eps_k, 2.2), 1e-4);
  const DegreeWeights& weights = model.weights;

  CVec alpha = init.flat();
  ModelEval ev = eval_model(alpha, model);
  double F = phi_value(alpha, weights) + psi(ev.g, params);
  std::deque<double> window{F};

  CVec alpha_prev, gradF_prev;
  NpgResult out;
  bool terminated = false;
  long n = 0;
  for (; n < config.max_inner_iterations; ++n) {
    const CVec sgrad = smooth_penalty_grad(ev, params);
    if (residual_terminate && max_group_residual(alpha, sgrad, weights) <= residual_eps) {
      terminated = true;
      break;
    }
    const CVec gradF = sgrad + phi_grad_nonzero(alpha, weights);
    double M = (n == 0) ? config.M_min
                        : bb_init(alpha_prev, alpha, gradF_prev, gradF, config);

    const double F_max = *std::max_element(window.begin(), window.end());
    bool accepted = false;
    CVec y;
    ModelEval ev_y;
    double F_y = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      y = prox_step(alpha, sgrad, M, weights);
      ev_y = eval_model(y, model);
      F_y = phi_value(y, weights) + psi(ev_y.g, params);
      const double step2 = (y - alpha).squaredNorm();
      if (F_y <= F_max - config.decrease_const * step2) {
        accepted = true;
        break;
      }
      M *= config.backtrack_growth;
    }
    if (!accepted) {  // cannot happen for finite curvature; guard anyway
      out.backtracking_failed = true;
      break;
    }

    const double disp_inf = (y - alpha).cwiseAbs().maxCoeff();
    const double rel_change = std::abs(F_y - F) / std::max(1.0, std::abs(F_y));
    alpha_prev = std::move(alpha);
    gradF_prev = gradF;
    alpha = std::move(y);
    ev = std::move(ev_y);
    F = F_y;
    window.push_back(F);
    if (static_cast<int>(window.size()) > config.history + 1) window.pop_front();
    if (!residual_terminate && disp_inf <= disp_tol && rel_change <= obj_tol) {
      if (residual_eps > 0.0 &&
          max_group_residual(alpha, smooth_penalty_grad(ev, params), weights) > residual_eps) {
        if (out.resumptions >= max_resumptions) {
          out.residual_failed = true;
          ++n;
          break;
        }
        ++out.resumptions;  // resume where we stand, with a tighter displacement rule
        disp_tol *= 0.1;
        continue;
      }
      terminated = true;
      ++n;
      break;
    }
  }
  if (residual_terminate && !terminated && !out.backtracking_failed)
    out.residual_failed = true;  // budget ran out before the target was met
  out.hit_iteration_cap = !terminated && !out.backtracking_failed && !out.residual_failed;
  out.iterations = n;
  out.alpha = CoefficientVector(model.band_limit, std::move(alpha));
  return out;
}

SolveResult penalty_solve(const DiscreteModel& model, const PenaltyConfig& pcfg,
                          const NpgConfig& ncfg, const TraceCallback& on_trace) {
  validate(pcfg);
  validate(ncfg);
  const auto t_start = std::chrono::steady_clock::now();
  const int L = model.band_limit;

  CVec alpha_tilde;
  Eigen::LLT<CMat> llt(model.gram);
  if (llt.info() == Eigen::Success) {
    alpha_tilde = llt.solve(model.rhs);
  } else {
    // Large band limits with small hidden caps leave a few harmonics invisible
    // on Gamma (eigenvalues at machine zero), so the Gram is only numerically
    // semidefinite; fall back to a truncated least-norm solve.  The cutoff
    // sqrt(machine eps) * lambda_max discards directions the data cannot
    // determine in double precision: smaller cutoffs amplify noise along
    // near-null eigenvectors into an anchor with a huge penalty value, while
    // the fit energy lost by truncation is negligible (those directions are
    // nearly invisible on Gamma), so the anchor stays feasible.
    Eigen::SelfAdjointEigenSolver<CMat> es(model.gram);
    if (es.info() != Eigen::Success)
      throw ConfigError("eigendecomposition of the model Gram matrix failed");
    const RVec& evals = es.eigenvalues();
    const double lambda_max = evals.maxCoeff();
    if (!(lambda_max > 0.0))
      throw ConfigError("model Gram matrix is zero; no coefficient is observable");
    const double cutoff =
        std::sqrt(std::numeric_limits<double>::epsilon()) * lambda_max;
    const CVec proj = es.eigenvectors().adjoint() * model.rhs;
    CVec scaled = CVec::Zero(proj.size());
    for (Eigen::Index i = 0; i < proj.size(); ++i)
      if (evals(i) > cutoff) scaled(i) = proj(i) / evals(i);
    alpha_tilde = es.eigenvectors() * scaled;
  }
  const ModelEval ev_tilde = eval_model(alpha_tilde, model);
  const double phi_tilde = phi_value(alpha_tilde, model.weights);

  CVec alpha = alpha_tilde;
  ModelEval ev = ev_tilde;
  double phi_cur = phi_tilde;

  double lambda = pcfg.lambda0, mu = pcfg.mu0, eps = pcfg.eps0;
  SolveResult result;
  result.status = SolveStatus::outer_cap;
  result.phi_anchor = phi_tilde;
  bool any_flag = false;

  for (int k = 0; k < pcfg.max_outer_iterations; ++k) {
    if (std::max(std::max(ev.g, 0.0), 0.01 * eps) <= pcfg.outer_tol) {
      result.status = SolveStatus::converged;
      break;
    }
    const SmoothingParams params{lambda, mu};

    // Step 1: fall back to alpha_tilde whenever it has the lower penalty value.
    const double F_cur = phi_cur + psi(ev.g, params);
    const double F_til = phi_tilde + psi(ev_tilde.g, params);
    if (F_cur > F_til) {
      alpha = alpha_tilde;
      ev = ev_tilde;
      phi_cur = phi_tilde;
    }

    // Step 2: inner solve with the scaled group residual enforced.
    const NpgResult inner = npg_solve(model, params, CoefficientVector(L, alpha), eps, ncfg,
                                      -1.0, eps, pcfg.max_residual_retries);
    long stage_inner = inner.iterations;
    if (inner.backtracking_failed) {
      any_flag = true;
      result.flags.push_back("stage " + std::to_string(k) + ": backtracking stalled");
    } else if (inner.hit_iteration_cap) {
      any_flag = true;
      result.flags.push_back("stage " + std::to_string(k) + ": inner iteration cap reached");
    } else if (inner.residual_failed) {
      any_flag = true;
      result.flags.push_back("stage " + std::to_string(k) +
                             ": scaled group residual above eps after " +
                             std::to_string(inner.resumptions + 1) + " attempts");
    }

    alpha = inner.alpha.flat();
    ev = eval_model(alpha, model);
    phi_cur = phi_value(alpha, model.weights);

    // Certificate polish: when this stage is about to trigger outer
    // termination, keep solving the same subproblem down to kkt_target so the
    // returned iterate is a scaled KKT point at reporting accuracy instead of
    // at the coarser last-stage eps.
    const double eps_next = std::max(pcfg.sigma2 * eps, pcfg.eps_floor);
    const bool stage_clean =
        !inner.backtracking_failed && !inner.hit_iteration_cap && !inner.residual_failed;
    if (stage_clean && pcfg.kkt_target > 0.0 && pcfg.kkt_target < eps &&
        std::max(std::max(ev.g, 0.0), 0.01 * eps_next) <= pcfg.outer_tol) {
      const NpgResult polish =
          npg_solve(model, params, CoefficientVector(L, alpha), eps, ncfg, -1.0, pcfg.kkt_target,
                    0, /*residual_terminate=*/true);
      stage_inner += polish.iterations;
      if (polish.backtracking_failed || polish.hit_iteration_cap || polish.residual_failed) {
        any_flag = true;
        result.flags.push_back("stage " + std::to_string(k) + ": certificate polish incomplete");
      }
      alpha = polish.alpha.flat();
      ev = eval_model(alpha, model);
      phi_cur = phi_value(alpha, model.weights);
    }

    TraceRecord rec;
    rec.k = k;
    rec.lambda = lambda;
    rec.mu = mu;
    rec.eps = eps;
    rec.phi = phi_cur;
    rec.g = ev.g;
    rec.gplus = std::max(ev.g, 0.0);
    rec.inner_iters = stage_inner;
    result.trace.push_back(rec);
    if (on_trace) on_trace(rec);
    result.total_inner_iterations += stage_inner;

    // Step 3: parameter updates.
    lambda *= pcfg.sigma1;
    mu *= pcfg.sigma2;
    eps = std::max(pcfg.sigma2 * eps, pcfg.eps_floor);
  }

  if (any_flag && result.status == SolveStatus::converged)
    result.status = SolveStatus::inner_flagged;
  result.outer_iterations = static_cast<int>(result.trace.size());
  result.alpha = CoefficientVector(L, std::move(alpha));
  result.feasibility = std::max(ev.g, 0.0);
  if (!result.trace.empty()) {
    result.lambda_final = result.trace.back().lambda;
    result.mu_final = result.trace.back().mu;
    result.eps_final = result.trace.back().eps;
  } else {
    result.lambda_final = pcfg.lambda0;
    result.mu_final = pcfg.mu0;
    result.eps_final = pcfg.eps0;
  }
  result.kkt = kkt_report(result.alpha, model);
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace sphinpaint
