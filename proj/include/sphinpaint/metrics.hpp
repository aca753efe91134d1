#pragma once

#include "sphinpaint/grid.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Relative coefficient error ||est - truth|| / ||truth||.
double rel_err(const CoefficientVector& est, const CoefficientVector& truth);

// Field SNR 20 log10(||truth|| / ||truth - est||) in quadrature L2 norms,
// capped at 300 dB (capped flag set) for exact recoveries.
double snr_db(const CVec& field_true, const CVec& field_est, const SphereGrid& grid,
              bool* capped = nullptr);

// (nnz, false positives): |est-support intersect true-support| and
// |est-support| - nnz at the given group-norm threshold.
struct SupportMetrics {
  int nnz = 0;
  int false_positives = 0;
  std::vector<int> support_true;
  std::vector<int> support_est;
};
SupportMetrics support_metrics(const CoefficientVector& est, const CoefficientVector& truth,
                               double threshold);

// Per-node absolute error |true - est|.
RVec pointwise_error(const CVec& field_true, const CVec& field_est);

// Bundle used by reports: coefficient error, field SNR, support counts.
struct RecoveryReport {
  double rel_err = 0.0;
  double snr_db = 0.0;
  bool snr_capped = false;
  int group_l0 = 0;  // ||alpha*||_{2,0} of the estimate
  int nnz = 0;
  int false_positives = 0;
  std::vector<int> support_true;
  std::vector<int> support_est;
};
RecoveryReport recovery_report(const CoefficientVector& est, const CoefficientVector& truth,
                               const SphereGrid& grid, double threshold);

}  // namespace sphinpaint
