// sphinpaint: spherical-field inpainting experiments.
//
// Subcommands: synth | mask | discretize | inpaint | report | render | kkt-check.
// Exit codes: 0 success, 2 solver flagged, 3 config error, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "sphinpaint/coeff_io.hpp"
#include "sphinpaint/diagnostics.hpp"
#include "sphinpaint/experiment.hpp"
#include "sphinpaint/harmonics.hpp"
#include "sphinpaint/model.hpp"
#include "sphinpaint/render.hpp"

namespace fs = std::filesystem;
using namespace sphinpaint;

namespace {

constexpr double kFeasibilityGate = 1e-6;

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;  // 0 = all cores
};

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig load_config(const GlobalArgs& g) {
  if (g.config_path.empty()) throw ConfigError("this command requires --config");
  ExperimentConfig config = experiment_config_from_json(load_json(g.config_path));
  if (g.seed_set) config.seed = g.seed;
  return config;
}

fs::path out_path(const GlobalArgs& g, const std::string& name) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir / name;
}

// All artifacts are written to <path>.tmp first and moved into place, so a
// failed run never leaves a truncated file under the final name.
template <typename Writer>
void atomic_file(const fs::path& path, Writer&& writer) {
  const fs::path tmp = path.string() + ".tmp";
  writer(tmp.string());
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  atomic_file(path, [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp);
  });
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void note(const std::string& line) { std::cerr << line << "\n"; }

void emit_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) note("warning: " + w);
}

nlohmann::json mask_to_json(const Mask& mask, const SphereGrid& grid) {
  std::vector<int> nodes;
  nodes.reserve(mask.n_observed);
  for (int j = 0; j < mask.n_nodes(); ++j)
    if (mask.is_observed(j)) nodes.push_back(j);
  return {{"spec", mask_spec_to_json(mask.spec)},
          {"band_limit", grid.supported_band_limit},
          {"n_theta", grid.n_theta()},
          {"n_phi", grid.n_phi()},
          {"n_nodes", mask.n_nodes()},
          {"n_observed", mask.n_observed},
          {"area", region_area(mask, grid)},
          {"observed_nodes", nodes}};
}

nlohmann::json render_result_to_json(const RenderResult& r) {
  return {{"rows", r.rows}, {"cols", r.cols}, {"min_value", r.min_value}, {"max_value", r.max_value}};
}

void render_coeffs_to(const GlobalArgs& g, const CoefficientVector& coeffs,
                      const std::string& stem, int rows, int cols) {
  const Eigen::MatrixXd image = render_equirect(coeffs, rows, cols);
  RenderResult result;
  atomic_file(out_path(g, stem + ".png"),
              [&](const std::string& tmp) { result = write_grayscale_png(tmp, image); });
  write_json(out_path(g, stem + "_render.json"), render_result_to_json(result));
}

void write_config_echo(const GlobalArgs& g, const ExperimentConfig& config) {
  write_json(out_path(g, "config.json"), experiment_config_to_json(config));
}

int cmd_synth(const GlobalArgs& g) {
  const ExperimentConfig config = load_config(g);
  const SphereGrid grid = build_grid(config.band_limit);
  SynthSpec spec;
  spec.band_limit = config.band_limit;
  spec.support = config.support;
  spec.support_count = config.support_count;
  spec.magnitude_profile = config.magnitude_profile;
  spec.seed = config.seed;
  const CoefficientVector truth = gen_true_coeffs(spec);

  atomic_file(out_path(g, "truth.csv"),
              [&](const std::string& tmp) { write_coeffs_csv(tmp, truth); });
  atomic_file(out_path(g, "truth_field.csv"), [&](const std::string& tmp) {
    write_field_csv(tmp, synthesize(truth, grid), grid);
  });
  render_coeffs_to(g, truth, "truth", config.render_rows, config.render_cols);
  write_config_echo(g, config);
  note("wrote truth.csv, truth_field.csv, truth.png");
  return 0;
}

int cmd_mask(const GlobalArgs& g) {
  const ExperimentConfig config = load_config(g);
  const SphereGrid grid = build_grid(config.band_limit);
  const Mask mask = build_mask(config.mask, grid);
  write_json(out_path(g, "mask.json"), mask_to_json(mask, grid));
  write_config_echo(g, config);
  note("wrote mask.json (" + std::to_string(mask.n_observed) + "/" +
       std::to_string(mask.n_nodes()) + " nodes observed)");
  return 0;
}

int cmd_discretize(const GlobalArgs& g) {
  const ExperimentConfig config = load_config(g);
  const SphereGrid grid = build_grid(config.band_limit);
  const Mask mask = build_mask(config.mask, grid);

  SynthSpec spec;
  spec.band_limit = config.band_limit;
  spec.support = config.support;
  spec.support_count = config.support_count;
  spec.magnitude_profile = config.magnitude_profile;
  spec.seed = config.seed;
  const CoefficientVector truth = gen_true_coeffs(spec);

  RVec noise = RVec::Zero(grid.n_nodes());
  if (config.noise_ratio) {
    noise = gen_noise(grid, 1.0, config.seed + 1);
    scale_noise_to_ratio(noise, grid, synthesize(truth, grid), *config.noise_ratio);
  } else if (config.noise_delta) {
    noise = gen_noise(grid, *config.noise_delta, config.seed + 1);
  }
  const CVec observed = observe(truth, mask, noise, grid);
  double rho = config.rho_value;
  if (config.rho_policy == "noise-energy") {
    const double n = field_l2_norm(noise, grid);
    rho = n * n;
  }

  std::vector<std::string> warnings;
  const DiscreteModel model =
      build_model(grid, mask, observed, config.band_limit, rho,
                  DegreeWeights::make(config.band_limit, config.p, config.eta), &warnings);
  emit_warnings(warnings);

  atomic_file(out_path(g, "model.bin"),
              [&](const std::string& tmp) { save_model(tmp, model); });
  atomic_file(out_path(g, "observed_field.csv"),
              [&](const std::string& tmp) { write_field_csv(tmp, observed, grid); });
  write_json(out_path(g, "mask.json"), mask_to_json(mask, grid));
  write_config_echo(g, config);
  note("wrote model.bin (dim " + std::to_string(model.dim()) + ", rho " + std::to_string(rho) +
       ")");
  return 0;
}

int finish_inpaint(const GlobalArgs& g, const SolveResult& solve,
                   const std::vector<std::string>& warnings) {
  nlohmann::json result_json = solve_result_to_json(solve);
  result_json["warnings"] = warnings;
  write_json(out_path(g, "solve_result.json"), result_json);
  write_json(out_path(g, "kkt_report.json"), kkt_report_to_json(solve.kkt));

  std::string trace_text;
  for (const auto& rec : solve.trace) trace_text += trace_record_to_json(rec).dump() + "\n";
  write_text(out_path(g, "trace.jsonl"), trace_text);

  atomic_file(out_path(g, "recovered.csv"),
              [&](const std::string& tmp) { write_coeffs_csv(tmp, solve.alpha); });

  char timing[64];
  std::snprintf(timing, sizeof(timing), "%.2f", solve.wall_time_seconds);
  note("status " + to_string(solve.status) + ", " + std::to_string(solve.outer_iterations) +
       " outer / " + std::to_string(solve.total_inner_iterations) + " inner iterations, " +
       timing + " s");
  const bool ok = solve.status == SolveStatus::converged && solve.feasibility <= kFeasibilityGate;
  if (!ok) {
    nlohmann::json reason = {{"status", to_string(solve.status)},
                             {"feasibility", solve.feasibility},
                             {"flags", solve.flags}};
    note("solver flagged: " + reason.dump());
    return 2;
  }
  return 0;
}

int cmd_inpaint(const GlobalArgs& g, const std::string& model_path,
                const std::string& truth_path) {
  if (!model_path.empty()) {
    // Solve a prebuilt discretization; config (if given) only supplies solver knobs.
    const DiscreteModel model = load_model(model_path);
    PenaltyConfig pcfg;
    NpgConfig ncfg;
    if (!g.config_path.empty()) {
      const ExperimentConfig config = experiment_config_from_json(load_json(g.config_path));
      pcfg = config.penalty;
      ncfg = config.npg;
    }
    const SolveResult solve = penalty_solve(model, pcfg, ncfg);
    const int code = finish_inpaint(g, solve, {});
    render_coeffs_to(g, solve.alpha, "recovered", 181, 360);
    if (!truth_path.empty()) {
      const CoefficientVector truth = read_coeffs_csv(truth_path);
      if (truth.band_limit() != model.band_limit)
        throw ConfigError("truth band limit " + std::to_string(truth.band_limit()) +
                          " does not match model band limit " +
                          std::to_string(model.band_limit));
      const SphereGrid grid = build_grid(model.band_limit);
      const RecoveryReport report = recovery_report(solve.alpha, truth, grid,
                                                    default_support_threshold(solve.alpha));
      write_json(out_path(g, "report.json"), recovery_report_to_json(report));
      std::cout << recovery_report_table_header() << "\n"
                << recovery_report_table_row(report) << "\n";
    }
    return code;
  }

  const ExperimentConfig config = load_config(g);
  const ExperimentArtifacts art = run_experiment(config);
  emit_warnings(art.warnings);
  write_config_echo(g, config);

  atomic_file(out_path(g, "truth.csv"),
              [&](const std::string& tmp) { write_coeffs_csv(tmp, art.truth); });
  atomic_file(out_path(g, "observed_field.csv"), [&](const std::string& tmp) {
    write_field_csv(tmp, art.observed, art.grid);
  });
  write_json(out_path(g, "mask.json"), mask_to_json(art.mask, art.grid));

  const int code = finish_inpaint(g, art.solve, art.warnings);
  write_json(out_path(g, "report.json"), recovery_report_to_json(art.report));
  render_coeffs_to(g, art.truth, "truth", config.render_rows, config.render_cols);
  render_coeffs_to(g, art.solve.alpha, "recovered", config.render_rows, config.render_cols);
  std::cout << recovery_report_table_header() << "\n"
            << recovery_report_table_row(art.report) << "\n";
  return code;
}

int cmd_report(const GlobalArgs& g, const std::string& truth_path, const std::string& est_path) {
  const CoefficientVector truth = read_coeffs_csv(truth_path);
  const CoefficientVector est = read_coeffs_csv(est_path);
  if (truth.band_limit() != est.band_limit())
    throw ConfigError("band-limit mismatch: truth has L=" + std::to_string(truth.band_limit()) +
                      ", estimate has L=" + std::to_string(est.band_limit()));
  const SphereGrid grid = build_grid(truth.band_limit());
  const RecoveryReport report =
      recovery_report(est, truth, grid, default_support_threshold(est));
  write_json(out_path(g, "report.json"), recovery_report_to_json(report));
  std::cout << recovery_report_table_header() << "\n"
            << recovery_report_table_row(report) << "\n";
  return 0;
}

int cmd_render(const GlobalArgs& g, const std::string& coeffs_path, const std::string& field_path,
               int rows, int cols, std::string stem) {
  if (coeffs_path.empty() == field_path.empty())
    throw ConfigError("render needs exactly one of --coeffs or --field");
  if (rows < 2 || cols < 1) throw ConfigError("render needs rows >= 2 and cols >= 1");
  Eigen::MatrixXd image;
  if (!coeffs_path.empty())
    image = render_equirect(read_coeffs_csv(coeffs_path), rows, cols);
  else
    image = render_equirect(read_field_csv(field_path), rows, cols);
  RenderResult result;
  atomic_file(out_path(g, stem + ".png"),
              [&](const std::string& tmp) { result = write_grayscale_png(tmp, image); });
  write_json(out_path(g, stem + "_render.json"), render_result_to_json(result));
  note("wrote " + stem + ".png");
  return 0;
}

int cmd_kkt_check(const GlobalArgs& g, const std::string& model_path,
                  const std::string& coeffs_path) {
  const DiscreteModel model = load_model(model_path);
  const CoefficientVector alpha = read_coeffs_csv(coeffs_path);
  if (alpha.band_limit() != model.band_limit)
    throw ConfigError("coefficient band limit " + std::to_string(alpha.band_limit()) +
                      " does not match model band limit " + std::to_string(model.band_limit));
  const KktReport report = kkt_report(alpha, model);
  const nlohmann::json j = kkt_report_to_json(report);
  write_json(out_path(g, "kkt_report.json"), j);
  std::cout << j.dump(2) << "\n";
  return report.feasibility <= kFeasibilityGate ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band-limited spherical field inpainting via smoothed group l2,p minimization"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "Experiment config JSON")->expected(1);
  auto* seed_opt = app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--threads", g.threads, "Linear-algebra thread cap (0 = all cores)");
  app.add_option("--out", g.out_dir, "Output directory (created if missing)");

  auto* synth = app.add_subcommand("synth", "Generate ground-truth coefficients and maps");
  auto* mask = app.add_subcommand("mask", "Evaluate the mask on the quadrature grid");
  auto* discretize =
      app.add_subcommand("discretize", "Assemble and store the discrete data-fit model");
  auto* inpaint = app.add_subcommand("inpaint", "Run the full inpainting experiment");
  std::string model_path, truth_path;
  inpaint->add_option("--model", model_path, "Solve a stored model instead of synthesizing");
  inpaint->add_option("--truth", truth_path, "Truth CSV for reporting (with --model)");

  auto* report = app.add_subcommand("report", "Compare estimated against true coefficients");
  std::string report_truth, report_est;
  report->add_option("--truth", report_truth, "True coefficient CSV")->required();
  report->add_option("--est", report_est, "Estimated coefficient CSV")->required();

  auto* render = app.add_subcommand("render", "Render an equirectangular grayscale map");
  std::string render_coeffs, render_field, render_stem = "render";
  int render_rows = 181, render_cols = 360;
  render->add_option("--coeffs", render_coeffs, "Coefficient CSV to synthesize and render");
  render->add_option("--field", render_field, "Node-field CSV to resample and render");
  render->add_option("--rows", render_rows, "Image rows (pole to pole)");
  render->add_option("--cols", render_cols, "Image columns (longitudes)");
  render->add_option("--name", render_stem, "Output file stem");

  auto* kkt = app.add_subcommand("kkt-check", "First-order diagnostics of a candidate solution");
  std::string kkt_model, kkt_coeffs;
  kkt->add_option("--model", kkt_model, "Stored model binary")->required();
  kkt->add_option("--coeffs", kkt_coeffs, "Candidate coefficient CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }
  g.seed_set = seed_opt->count() > 0;
  Eigen::setNbThreads(g.threads);

  try {
    if (synth->parsed()) return cmd_synth(g);
    if (mask->parsed()) return cmd_mask(g);
    if (discretize->parsed()) return cmd_discretize(g);
    if (inpaint->parsed()) return cmd_inpaint(g, model_path, truth_path);
    if (report->parsed()) return cmd_report(g, report_truth, report_est);
    if (render->parsed())
      return cmd_render(g, render_coeffs, render_field, render_rows, render_cols, render_stem);
    if (kkt->parsed()) return cmd_kkt_check(g, kkt_model, kkt_coeffs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 3;
}
