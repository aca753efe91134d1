#include "sphinpaint/experiment.hpp"

#include <cmath>
#include <cstdio>

#include "sphinpaint/diagnostics.hpp"
#include "sphinpaint/harmonics.hpp"

namespace sphinpaint {

namespace {

// Wraps nlohmann exceptions into ConfigError with the offending key.
template <typename T>
T get_as(const nlohmann::json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig config;
  config.band_limit = get_as<int>(j, "band_limit", config.band_limit);
  if (config.band_limit < 0) throw ConfigError("band_limit must be nonnegative");
  config.p = get_as<double>(j, "p", config.p);
  config.eta = get_as<double>(j, "eta", config.eta);
  config.seed = get_as<std::uint64_t>(j, "seed", config.seed);

  if (j.contains("synth")) {
    const auto& js = j.at("synth");
    config.support = get_as<std::vector<int>>(js, "support", {});
    if (js.contains("support_count")) config.support_count = js.at("support_count").get<int>();
    if (js.contains("magnitude_profile")) {
      for (const auto& [key, value] : js.at("magnitude_profile").items()) {
        try {
          config.magnitude_profile[std::stoi(key)] = value.get<double>();
        } catch (const std::exception&) {
          throw ConfigError("magnitude_profile keys must be degree integers, got '" + key + "'");
        }
      }
    }
  }

  if (j.contains("noise")) {
    const auto& jn = j.at("noise");
    if (jn.contains("ratio") && jn.contains("delta"))
      throw ConfigError("give either noise.ratio or noise.delta, not both");
    if (jn.contains("ratio")) config.noise_ratio = jn.at("ratio").get<double>();
    if (jn.contains("delta")) config.noise_delta = jn.at("delta").get<double>();
  }

  if (j.contains("rho")) {
    const auto& jr = j.at("rho");
    config.rho_policy = get_as<std::string>(jr, "policy", config.rho_policy);
    if (config.rho_policy == "explicit") {
      if (!jr.contains("value")) throw ConfigError("rho.policy 'explicit' needs rho.value");
      config.rho_value = jr.at("value").get<double>();
    } else if (config.rho_policy != "noise-energy") {
      throw ConfigError("rho.policy must be 'noise-energy' or 'explicit'");
    }
  }

  if (j.contains("mask")) {
    const auto& jm = j.at("mask");
    if (jm.contains("preset"))
      config.mask = preset_mask_spec(jm.at("preset").get<std::string>());
    else
      config.mask = parse_mask_spec(jm);
  } else {
    throw ConfigError("experiment config needs a 'mask' section");
  }

  if (j.contains("solver")) {
    const auto& js = j.at("solver");
    config.penalty.lambda0 = get_as<double>(js, "lambda0", config.penalty.lambda0);
    config.penalty.mu0 = get_as<double>(js, "mu0", config.penalty.mu0);
    config.penalty.eps0 = get_as<double>(js, "eps0", config.penalty.eps0);
    config.penalty.sigma1 = get_as<double>(js, "sigma1", config.penalty.sigma1);
    config.penalty.sigma2 = get_as<double>(js, "sigma2", config.penalty.sigma2);
    config.penalty.eps_floor = get_as<double>(js, "eps_floor", config.penalty.eps_floor);
    config.penalty.outer_tol = get_as<double>(js, "outer_tol", config.penalty.outer_tol);
    config.penalty.max_outer_iterations =
        get_as<int>(js, "max_outer_iterations", config.penalty.max_outer_iterations);
    config.penalty.max_residual_retries =
        get_as<int>(js, "max_residual_retries", config.penalty.max_residual_retries);
    config.penalty.kkt_target = get_as<double>(js, "kkt_target", config.penalty.kkt_target);
  }
  if (j.contains("npg")) {
    const auto& jn = j.at("npg");
    config.npg.M_min = get_as<double>(jn, "M_min", config.npg.M_min);
    config.npg.M_max = get_as<double>(jn, "M_max", config.npg.M_max);
    config.npg.backtrack_growth =
        get_as<double>(jn, "backtrack_growth", config.npg.backtrack_growth);
    config.npg.decrease_const = get_as<double>(jn, "decrease_const", config.npg.decrease_const);
    config.npg.history = get_as<int>(jn, "history", config.npg.history);
    config.npg.max_inner_iterations = get_as<long>(
        jn, "max_inner_iterations", config.npg.max_inner_iterations);
  }
  if (j.contains("render")) {
    config.render_rows = get_as<int>(j.at("render"), "rows", config.render_rows);
    config.render_cols = get_as<int>(j.at("render"), "cols", config.render_cols);
  }
  return config;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["band_limit"] = config.band_limit;
  j["p"] = config.p;
  j["eta"] = config.eta;
  j["seed"] = config.seed;
  nlohmann::json js;
  if (!config.support.empty()) js["support"] = config.support;
  if (config.support_count) js["support_count"] = *config.support_count;
  if (!config.magnitude_profile.empty()) {
    nlohmann::json mp;
    for (const auto& [l, scale] : config.magnitude_profile) mp[std::to_string(l)] = scale;
    js["magnitude_profile"] = mp;
  }
  j["synth"] = js;
  nlohmann::json jn;
  if (config.noise_ratio) jn["ratio"] = *config.noise_ratio;
  if (config.noise_delta) jn["delta"] = *config.noise_delta;
  j["noise"] = jn;
  j["rho"]["policy"] = config.rho_policy;
  if (config.rho_policy == "explicit") j["rho"]["value"] = config.rho_value;
  j["mask"] = mask_spec_to_json(config.mask);
  j["solver"] = {{"lambda0", config.penalty.lambda0},
                 {"mu0", config.penalty.mu0},
                 {"eps0", config.penalty.eps0},
                 {"sigma1", config.penalty.sigma1},
                 {"sigma2", config.penalty.sigma2},
                 {"eps_floor", config.penalty.eps_floor},
                 {"outer_tol", config.penalty.outer_tol},
                 {"max_outer_iterations", config.penalty.max_outer_iterations},
                 {"max_residual_retries", config.penalty.max_residual_retries},
                 {"kkt_target", config.penalty.kkt_target}};
  j["npg"] = {{"M_min", config.npg.M_min},
              {"M_max", config.npg.M_max},
              {"backtrack_growth", config.npg.backtrack_growth},
              {"decrease_const", config.npg.decrease_const},
              {"history", config.npg.history},
              {"max_inner_iterations", config.npg.max_inner_iterations}};
  j["render"] = {{"rows", config.render_rows}, {"cols", config.render_cols}};
  return j;
}

ExperimentArtifacts run_experiment(const ExperimentConfig& config, const TraceCallback& on_trace) {
  ExperimentArtifacts art;
  art.grid = build_grid(config.band_limit);
  art.mask = build_mask(config.mask, art.grid);

  SynthSpec synth;
  synth.band_limit = config.band_limit;
  synth.support = config.support;
  synth.support_count = config.support_count;
  synth.magnitude_profile = config.magnitude_profile;
  synth.seed = config.seed;
  art.truth = gen_true_coeffs(synth);

  if (config.noise_ratio && config.noise_delta)
    throw ConfigError("give either a noise ratio or a noise delta, not both");
  if (config.noise_ratio) {
    art.noise = gen_noise(art.grid, 1.0, config.seed + 1);
    scale_noise_to_ratio(art.noise, art.grid, synthesize(art.truth, art.grid),
                         *config.noise_ratio);
  } else if (config.noise_delta) {
    art.noise = gen_noise(art.grid, *config.noise_delta, config.seed + 1);
  } else {
    art.noise = RVec::Zero(art.grid.n_nodes());
  }

  art.observed = observe(art.truth, art.mask, art.noise, art.grid);

  if (config.rho_policy == "noise-energy") {
    const double n = field_l2_norm(art.noise, art.grid);
    art.rho = n * n;
  } else if (config.rho_policy == "explicit") {
    art.rho = config.rho_value;
  } else {
    throw ConfigError("rho policy must be 'noise-energy' or 'explicit'");
  }

  art.model = build_model(art.grid, art.mask, art.observed, config.band_limit, art.rho,
                          DegreeWeights::make(config.band_limit, config.p, config.eta),
                          &art.warnings);
  art.solve = penalty_solve(art.model, config.penalty, config.npg, on_trace);
  art.report = recovery_report(art.solve.alpha, art.truth, art.grid,
                               default_support_threshold(art.solve.alpha));
  return art;
}

nlohmann::json trace_record_to_json(const TraceRecord& rec) {
  return {{"k", rec.k},       {"lambda", rec.lambda}, {"mu", rec.mu},
          {"eps", rec.eps},   {"phi", rec.phi},       {"g", rec.g},
          {"gplus", rec.gplus}, {"inner_iters", rec.inner_iters}};
}

nlohmann::json kkt_report_to_json(const KktReport& report) {
  return {{"nu", report.nu},
          {"max_residual", report.max_residual},
          {"complementarity", report.complementarity},
          {"feasibility", report.feasibility},
          {"degenerate", report.degenerate},
          {"stationarity_residuals", report.stationarity_residuals}};
}

nlohmann::json solve_result_to_json(const SolveResult& result) {
  nlohmann::json j;
  j["status"] = to_string(result.status);
  j["outer_iterations"] = result.outer_iterations;
  j["total_inner_iterations"] = result.total_inner_iterations;
  j["feasibility"] = result.feasibility;
  j["phi_anchor"] = result.phi_anchor;
  j["lambda_final"] = result.lambda_final;
  j["mu_final"] = result.mu_final;
  j["eps_final"] = result.eps_final;
  j["flags"] = result.flags;
  j["kkt"] = kkt_report_to_json(result.kkt);
  return j;
}

nlohmann::json recovery_report_to_json(const RecoveryReport& report) {
  return {{"rel_err", report.rel_err},
          {"snr_db", report.snr_db},
          {"snr_capped", report.snr_capped},
          {"group_l0", report.group_l0},
          {"nnz", report.nnz},
          {"false", report.false_positives},
          {"support_true", report.support_true},
          {"support_est", report.support_est}};
}

std::string recovery_report_table_header() {
  return "RelErr        group_l0  nnz  false  SNR_dB";
}

std::string recovery_report_table_row(const RecoveryReport& report) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12.4e  %8d  %3d  %5d  %8.2f", report.rel_err,
                report.group_l0, report.nnz, report.false_positives, report.snr_db);
  return buf;
}

}  // namespace sphinpaint
