#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sphinpaint/metrics.hpp"
#include "sphinpaint/solver.hpp"
#include "sphinpaint/synth.hpp"

namespace sphinpaint {

// Full description of a synthetic inpainting run: truth, noise, mask, model
// and solver parameters.  Parsed from / serialized to a stable JSON document.
struct ExperimentConfig {
  int band_limit = 35;
  double p = 0.5;
  double eta = 1.0 + 1e-4;
  std::uint64_t seed = 1;

  std::vector<int> support;          // explicit truth support, or
  std::optional<int> support_count;  // drawn support size (one of the two)
  std::map<int, double> magnitude_profile;

  std::optional<double> noise_ratio;  // ||noise|| / ||truth field||
  std::optional<double> noise_delta;  // per-node standard deviation

  std::string rho_policy = "noise-energy";  // or "explicit"
  double rho_value = 0.0;

  MaskSpec mask;

  PenaltyConfig penalty;
  NpgConfig npg;

  int render_rows = 181;
  int render_cols = 360;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

// Everything produced by one run, kept for reporting and file output.
struct ExperimentArtifacts {
  SphereGrid grid;
  Mask mask;
  CoefficientVector truth;
  RVec noise;
  CVec observed;
  double rho = 0.0;
  DiscreteModel model;
  SolveResult solve;
  RecoveryReport report;
  std::vector<std::string> warnings;
};

// build grid -> mask -> truth -> noise -> observed -> model -> solve -> report.
// The truth stream is seeded with `seed`, the noise stream with `seed + 1`.
ExperimentArtifacts run_experiment(const ExperimentConfig& config,
                                   const TraceCallback& on_trace = nullptr);

// JSON views used by the CLI and the python layer.
nlohmann::json trace_record_to_json(const TraceRecord& rec);
nlohmann::json kkt_report_to_json(const KktReport& report);
nlohmann::json solve_result_to_json(const SolveResult& result);
nlohmann::json recovery_report_to_json(const RecoveryReport& report);

// Fixed-order table row: RelErr, ||alpha*||_{2,0}, nnz, false, SNR.
std::string recovery_report_table_row(const RecoveryReport& report);
std::string recovery_report_table_header();

}  // namespace sphinpaint
