#pragma once

#include "sphinpaint/model.hpp"
#include "sphinpaint/objective.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Scaled first-order (KKT) diagnostics for
//   min Phi(alpha)  s.t.  g(alpha) <= 0:
// per-group stationarity  p beta_l ||alpha_{l.}||^p alpha_{l.}
//                       + 2 nu ||alpha_{l.}||^2 (gram alpha - rhs)_{l.} = 0,
// complementarity nu * g(alpha) = 0, nu >= 0.
struct KktReport {
  double nu = 0.0;
  std::vector<double> stationarity_residuals;  // one per degree
  double max_residual = 0.0;
  double complementarity = 0.0;
  double feasibility = 0.0;  // (g(alpha))_+
  bool degenerate = false;   // no nonzero group to fit nu against
};

// Estimates nu by nonnegative least squares over the nonzero groups; nu = 0 is
// forced when alpha is strictly feasible (g(alpha) < -1e-9).
KktReport kkt_report(const CoefficientVector& alpha, const DiscreteModel& model);

// Theoretical magnitude floor for nonzero groups of a stationary point:
// ||alpha_{l.}|| >= (p beta_l / (2 nu c_tilde))^{1/(1-p)} per degree.
std::vector<double> group_lower_bound(const DiscreteModel& model, double nu, double c_tilde);

// Degrees whose group norm exceeds the threshold.  The default threshold is
// 1e-8 relative to the largest group norm.
std::vector<int> support(const CoefficientVector& alpha, double threshold);
double default_support_threshold(const CoefficientVector& alpha);

}  // namespace sphinpaint
