#include "sphinpaint/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace sphinpaint {

KktReport kkt_report(const CoefficientVector& alpha, const DiscreteModel& model) {
  if (alpha.band_limit() != model.band_limit)
    throw ConfigError("coefficient band limit does not match the model");
  const ModelEval ev = eval_model(alpha.flat(), model);
  const int L = model.band_limit;
  const double p = model.p();

  KktReport report;
  report.feasibility = std::max(ev.g, 0.0);

  // Stationarity decomposes per group as a_l + nu * b_l with
  // a_l = p beta_l r_l^p alpha_l and b_l = 2 r_l^2 residual_l.
  std::vector<CVec> a(L + 1), b(L + 1);
  double btb = 0.0, bta = 0.0;
  bool any_nonzero = false;
  for (int l = 0; l <= L; ++l) {
    const double r = alpha.group_norm(l);
    if (r == 0.0) continue;
    any_nonzero = true;
    a[l] = p * model.weights.values[l] * std::pow(r, p) * alpha.group(l);
    b[l] = 2.0 * r * r * ev.residual.segment(l * l, 2 * l + 1);
    btb += b[l].squaredNorm();
    bta += b[l].dot(a[l]).real();
  }

  if (!any_nonzero) {
    report.degenerate = true;
    report.nu = 0.0;
  } else if (ev.g < -1e-9) {
    report.nu = 0.0;  // strictly feasible: complementarity forces nu = 0
  } else if (btb > 0.0) {
    report.nu = std::max(0.0, -bta / btb);
  }

  report.stationarity_residuals.assign(L + 1, 0.0);
  for (int l = 0; l <= L; ++l) {
    if (a[l].size() == 0) continue;
    report.stationarity_residuals[l] = (a[l] + report.nu * b[l]).norm();
  }
  report.max_residual = *std::max_element(report.stationarity_residuals.begin(),
                                          report.stationarity_residuals.end());
  report.complementarity = std::abs(report.nu * ev.g);
  return report;
}

std::vector<double> group_lower_bound(const DiscreteModel& model, double nu, double c_tilde) {
  if (!(nu > 0.0)) throw ConfigError("lower bound needs a positive multiplier nu");
  if (!(c_tilde > 0.0)) throw ConfigError("lower bound needs a positive residual bound c_tilde");
  const double p = model.p();
  std::vector<double> bounds(model.band_limit + 1);
  for (int l = 0; l <= model.band_limit; ++l)
    bounds[l] =
        std::pow(p * model.weights.values[l] / (2.0 * nu * c_tilde), 1.0 / (1.0 - p));
  return bounds;
}

std::vector<int> support(const CoefficientVector& alpha, double threshold) {
  std::vector<int> degrees;
  for (int l = 0; l <= alpha.band_limit(); ++l)
    if (alpha.group_norm(l) > threshold) degrees.push_back(l);
  return degrees;
}

double default_support_threshold(const CoefficientVector& alpha) {
  double max_norm = 0.0;
  for (int l = 0; l <= alpha.band_limit(); ++l)
    max_norm = std::max(max_norm, alpha.group_norm(l));
  return 1e-8 * max_norm;
}

}  // namespace sphinpaint
