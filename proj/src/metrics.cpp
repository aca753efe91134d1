#include "sphinpaint/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sphinpaint/diagnostics.hpp"
#include "sphinpaint/harmonics.hpp"

namespace sphinpaint {

namespace {

constexpr double kSnrCapDb = 300.0;

double weighted_norm(const CVec& field, const SphereGrid& grid) {
  double e = 0.0;
  for (int j = 0; j < grid.n_nodes(); ++j) e += grid.weights(j) * std::norm(field(j));
  return std::sqrt(e);
}

}  // namespace

double rel_err(const CoefficientVector& est, const CoefficientVector& truth) {
  if (est.band_limit() != truth.band_limit())
    throw ConfigError("coefficient band limits differ in rel_err");
  const double denom = truth.flat().norm();
  if (denom == 0.0) throw ConfigError("rel_err needs a nonzero truth vector");
  return (est.flat() - truth.flat()).norm() / denom;
}

double snr_db(const CVec& field_true, const CVec& field_est, const SphereGrid& grid,
              bool* capped) {
  if (field_true.size() != grid.n_nodes() || field_est.size() != grid.n_nodes())
    throw ConfigError("field and grid node counts differ in snr_db");
  const double signal = weighted_norm(field_true, grid);
  if (signal == 0.0) throw ConfigError("snr_db needs a nonzero true field");
  const double err = weighted_norm(field_true - field_est, grid);
  if (capped) *capped = false;
  if (err == 0.0) {
    if (capped) *capped = true;
    return kSnrCapDb;
  }
  const double value = 20.0 * std::log10(signal / err);
  if (value > kSnrCapDb) {
    if (capped) *capped = true;
    return kSnrCapDb;
  }
  return value;
}

SupportMetrics support_metrics(const CoefficientVector& est, const CoefficientVector& truth,
                               double threshold) {
  if (est.band_limit() != truth.band_limit())
    throw ConfigError("coefficient band limits differ in support_metrics");
  SupportMetrics out;
  out.support_true = support(truth, threshold);
  out.support_est = support(est, threshold);
  for (int l : out.support_est)
    if (std::binary_search(out.support_true.begin(), out.support_true.end(), l)) ++out.nnz;
  out.false_positives = static_cast<int>(out.support_est.size()) - out.nnz;
  return out;
}

RVec pointwise_error(const CVec& field_true, const CVec& field_est) {
  if (field_true.size() != field_est.size())
    throw ConfigError("field sizes differ in pointwise_error");
  return (field_true - field_est).cwiseAbs();
}

RecoveryReport recovery_report(const CoefficientVector& est, const CoefficientVector& truth,
                               const SphereGrid& grid, double threshold) {
  RecoveryReport report;
  report.rel_err = rel_err(est, truth);
  const CVec f_true = synthesize(truth, grid);
  const CVec f_est = synthesize(est, grid);
  report.snr_db = snr_db(f_true, f_est, grid, &report.snr_capped);
  const SupportMetrics sm = support_metrics(est, truth, threshold);
  report.nnz = sm.nnz;
  report.false_positives = sm.false_positives;
  report.support_true = sm.support_true;
  report.support_est = sm.support_est;
  report.group_l0 = static_cast<int>(sm.support_est.size());
  return report;
}

}  // namespace sphinpaint
