#pragma once

#include <functional>

#include "sphinpaint/diagnostics.hpp"
#include "sphinpaint/model.hpp"
#include "sphinpaint/objective.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Nonmonotone proximal gradient (inner) solver parameters.
struct NpgConfig {
  double M_min = 1.0;
  double M_max = 1e6;           // clamp for the Barzilai-Borwein initialization
  double backtrack_growth = 2.0;
  double decrease_const = 1e-4;  // sufficient-decrease constant b
  int history = 4;               // nonmonotone window length N
  long max_inner_iterations = 10000;
};

// Smoothing penalty (outer) loop parameters.
struct PenaltyConfig {
  double lambda0 = 20.0;
  double mu0 = 1.0;
  double eps0 = 1.0;
  double sigma1 = 2.0;   // lambda multiplier per stage
  double sigma2 = 0.5;   // mu and eps multiplier per stage
  double eps_floor = 1e-6;
  double outer_tol = 1e-6;  // stop when max{(g)_+, 0.01 eps} <= outer_tol
  int max_outer_iterations = 60;
  int max_residual_retries = 5;  // displacement-tolerance tightenings per stage
  // Scaled-residual target enforced on the stage that triggers outer
  // termination, so the returned iterate certifies as a scaled KKT point at
  // reporting accuracy rather than at the last stage's eps.  <= 0 disables.
  double kkt_target = 2e-6;
};

// One outer-stage record; serialized as a JSONL object by the CLI.
struct TraceRecord {
  int k = 0;
  double lambda = 0.0;
  double mu = 0.0;
  double eps = 0.0;
  double phi = 0.0;
  double g = 0.0;
  double gplus = 0.0;
  long inner_iters = 0;
};

enum class SolveStatus { converged, outer_cap, inner_flagged };
std::string to_string(SolveStatus status);

struct SolveResult {
  CoefficientVector alpha;
  SolveStatus status = SolveStatus::outer_cap;
  int outer_iterations = 0;
  long total_inner_iterations = 0;
  double feasibility = 0.0;   // (g(alpha))_+ at the returned iterate
  double phi_anchor = 0.0;    // Phi(alpha_tilde), the per-stage penalty ceiling
  double lambda_final = 0.0;
  double mu_final = 0.0;
  double eps_final = 0.0;
  std::vector<TraceRecord> trace;
  std::vector<std::string> flags;  // stage-level incidents (caps, retry exhaustion)
  KktReport kkt;
  double wall_time_seconds = 0.0;
};

// Barzilai-Borwein curvature from consecutive iterates and full conjugate
// gradients of F_{lambda,mu}: |<d_alpha, d_grad>| / ||d_alpha||^2,
// clamped to [M_min, M_max]; M_min when the displacement vanishes.
double bb_init(const CVec& alpha_prev, const CVec& alpha_cur, const CVec& grad_prev,
               const CVec& grad_cur, const NpgConfig& config);

// One proximal step at fixed curvature M: groupwise prox of Phi at
// z = alpha - grad_f / M (grad_f the smooth conjugate gradient).
CoefficientVector npg_step(const CoefficientVector& alpha, const DiscreteModel& model,
                           const SmoothingParams& params, double M);

struct NpgResult {
  CoefficientVector alpha;
  long iterations = 0;
  int resumptions = 0;  // displacement-tolerance tightenings spent on the residual check
  bool hit_iteration_cap = false;
  bool backtracking_failed = false;
  bool residual_failed = false;  // scaled group residual still above target
};

// Runs the nonmonotone proximal gradient method on F_{lambda,mu} from `init`
// until both the iterate displacement (inf-norm <= displacement_tol, default
// sqrt(eps_k)) and the relative objective change (<= min{eps_k^2.2, 1e-4})
// are small, or the iteration cap is hit.  With residual_eps > 0 the scaled
// group residual (residual_ok) is additionally enforced at that level: when
// the displacement rule fires early, the run resumes with the displacement
// tolerance tightened by x0.1, up to max_resumptions times, before flagging.
// With residual_terminate the displacement rule is ignored and the run stops
// as soon as the scaled residual reaches residual_eps (used for the final
// certificate polish), flagging residual_failed if the budget runs out.
NpgResult npg_solve(const DiscreteModel& model, const SmoothingParams& params,
                    const CoefficientVector& init, double eps_k, const NpgConfig& config,
                    double displacement_tol = -1.0, double residual_eps = -1.0,
                    int max_resumptions = 0, bool residual_terminate = false);

// Per-group scaled stationarity test of the smoothed problem:
// || p beta_l r_l^p alpha_l + 2 r_l^2 (grad f)_l || <= eps for every degree.
bool residual_ok(const CoefficientVector& alpha, const DiscreteModel& model,
                 const SmoothingParams& params, double eps);

using TraceCallback = std::function<void(const TraceRecord&)>;

// Smoothing penalty method: starts from alpha_tilde = gram^{-1} rhs, runs NPG
// stages with (lambda, mu, eps) updated by (sigma1, sigma2) per stage, resets
// to alpha_tilde whenever it has lower F, and stops when
// max{(g)_+, 0.01 eps} <= outer_tol.  After each stage's stopping rule fires,
// the scaled group residual is enforced by tightening the displacement
// tolerance (x0.1, up to max_residual_retries resumptions) before flagging.
SolveResult penalty_solve(const DiscreteModel& model, const PenaltyConfig& pcfg = {},
                          const NpgConfig& ncfg = {}, const TraceCallback& on_trace = nullptr);

}  // namespace sphinpaint
