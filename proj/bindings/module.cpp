#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdlib>

#include <json.hpp>

#include "sphinpaint/coeff_io.hpp"
#include "sphinpaint/diagnostics.hpp"
#include "sphinpaint/experiment.hpp"
#include "sphinpaint/harmonics.hpp"
#include "sphinpaint/metrics.hpp"
#include "sphinpaint/model.hpp"
#include "sphinpaint/objective.hpp"
#include "sphinpaint/prox.hpp"
#include "sphinpaint/render.hpp"
#include "sphinpaint/solver.hpp"
#include "sphinpaint/synth.hpp"

namespace py = pybind11;
using namespace sphinpaint;

namespace {

// JSON crosses the boundary as strings; python callers use json.loads/dumps.
nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spherical-harmonic field inpainting via smoothed group l2,p minimization";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("flat_index", py::overload_cast<int, int>(&flat_index), py::arg("l"), py::arg("m"));
  m.def("coeff_dim", &coeff_dim, py::arg("band_limit"));

  py::class_<CoefficientVector>(m, "CoefficientVector")
      .def(py::init<int>(), py::arg("band_limit"))
      .def(py::init<int, CVec>(), py::arg("band_limit"), py::arg("flat"))
      .def_property_readonly("band_limit", &CoefficientVector::band_limit)
      .def_property_readonly("dim", &CoefficientVector::dim)
      .def("flat", [](const CoefficientVector& c) { return c.flat(); })
      .def("at", py::overload_cast<int, int>(&CoefficientVector::at, py::const_), py::arg("l"),
           py::arg("m"))
      .def("group", [](const CoefficientVector& c, int l) { return CVec(c.group(l)); },
           py::arg("l"))
      .def("group_norm", &CoefficientVector::group_norm, py::arg("l"));

  py::class_<SphereGrid>(m, "SphereGrid")
      .def_readonly("colatitudes", &SphereGrid::colatitudes)
      .def_readonly("longitudes", &SphereGrid::longitudes)
      .def_readonly("weights", &SphereGrid::weights)
      .def_readonly("supported_band_limit", &SphereGrid::supported_band_limit)
      .def_property_readonly("n_theta", &SphereGrid::n_theta)
      .def_property_readonly("n_phi", &SphereGrid::n_phi)
      .def_property_readonly("n_nodes", &SphereGrid::n_nodes)
      .def("theta", &SphereGrid::theta, py::arg("node"))
      .def("phi", &SphereGrid::phi, py::arg("node"));
  m.def("build_grid", &build_grid, py::arg("band_limit"));

  py::class_<Mask>(m, "Mask")
      .def_readonly("observed", &Mask::observed)
      .def_readonly("n_observed", &Mask::n_observed)
      .def_property_readonly("n_nodes", &Mask::n_nodes)
      .def("is_observed", &Mask::is_observed, py::arg("node"))
      .def("spec_json", [](const Mask& mask) { return mask_spec_to_json(mask.spec).dump(); });
  m.def("build_mask",
        [](const std::string& spec_json, const SphereGrid& grid) {
          return build_mask(parse_mask_spec(parse_json(spec_json)), grid);
        },
        py::arg("spec_json"), py::arg("grid"));
  m.def("preset_mask", [](const std::string& name, const SphereGrid& grid) {
          return build_mask(preset_mask_spec(name), grid);
        },
        py::arg("name"), py::arg("grid"));
  m.def("preset_mask_names", &preset_mask_names);
  m.def("region_area", &region_area, py::arg("mask"), py::arg("grid"));

  m.def("ylm",
        [](int l, int mm, double theta, double phi) {
          if (l < 0 || std::abs(mm) > l) throw ConfigError("invalid harmonic index");
          CVec out(coeff_dim(l));
          ylm_point(l, theta, phi, out);
          return out(flat_index(l, mm));
        },
        py::arg("l"), py::arg("m"), py::arg("theta"), py::arg("phi"));
  m.def("synthesize", &synthesize, py::arg("coeffs"), py::arg("grid"));
  m.def("analyze", &analyze, py::arg("field"), py::arg("grid"), py::arg("band_limit"));

  py::class_<DegreeWeights>(m, "DegreeWeights")
      .def_readonly("p", &DegreeWeights::p)
      .def_readonly("eta", &DegreeWeights::eta)
      .def_readonly("values", &DegreeWeights::values);
  m.def("degree_weights", &DegreeWeights::make, py::arg("band_limit"), py::arg("p"),
        py::arg("eta"));

  py::class_<DiscreteModel>(m, "DiscreteModel")
      .def_readonly("band_limit", &DiscreteModel::band_limit)
      .def_readonly("gram", &DiscreteModel::gram)
      .def_readonly("rhs", &DiscreteModel::rhs)
      .def_readonly("c", &DiscreteModel::c)
      .def_readonly("rho", &DiscreteModel::rho)
      .def_property_readonly("dim", &DiscreteModel::dim)
      .def_property_readonly("p", &DiscreteModel::p)
      .def_property_readonly("eta", &DiscreteModel::eta);
  m.def("build_model",
        [](const SphereGrid& grid, const Mask& mask, const CVec& observed, int band_limit,
           double rho, const DegreeWeights& weights) {
          std::vector<std::string> warnings;
          DiscreteModel model = build_model(grid, mask, observed, band_limit, rho, weights,
                                            &warnings);
          return py::make_tuple(std::move(model), warnings);
        },
        py::arg("grid"), py::arg("mask"), py::arg("observed"), py::arg("band_limit"),
        py::arg("rho"), py::arg("weights"));
  m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &load_model, py::arg("path"));

  m.def("phi_value",
        py::overload_cast<const CoefficientVector&, const DegreeWeights&>(&phi_value),
        py::arg("coeffs"), py::arg("weights"));
  m.def("constraint_g", &constraint_g, py::arg("coeffs"), py::arg("model"));
  m.def("penalty_value", &penalty_value, py::arg("coeffs"), py::arg("model"), py::arg("lambda"));
  m.def("scalar_prox",
        [](double r, double beta, double p, double M) {
          return scalar_prox(ProxInstance{r, beta, p, M});
        },
        py::arg("r"), py::arg("beta"), py::arg("p"), py::arg("M"));

  py::class_<NpgConfig>(m, "NpgConfig")
      .def(py::init<>())
      .def_readwrite("M_min", &NpgConfig::M_min)
      .def_readwrite("M_max", &NpgConfig::M_max)
      .def_readwrite("backtrack_growth", &NpgConfig::backtrack_growth)
      .def_readwrite("decrease_const", &NpgConfig::decrease_const)
      .def_readwrite("history", &NpgConfig::history)
      .def_readwrite("max_inner_iterations", &NpgConfig::max_inner_iterations);
  py::class_<PenaltyConfig>(m, "PenaltyConfig")
      .def(py::init<>())
      .def_readwrite("lambda0", &PenaltyConfig::lambda0)
      .def_readwrite("mu0", &PenaltyConfig::mu0)
      .def_readwrite("eps0", &PenaltyConfig::eps0)
      .def_readwrite("sigma1", &PenaltyConfig::sigma1)
      .def_readwrite("sigma2", &PenaltyConfig::sigma2)
      .def_readwrite("eps_floor", &PenaltyConfig::eps_floor)
      .def_readwrite("outer_tol", &PenaltyConfig::outer_tol)
      .def_readwrite("max_outer_iterations", &PenaltyConfig::max_outer_iterations)
      .def_readwrite("max_residual_retries", &PenaltyConfig::max_residual_retries)
      .def_readwrite("kkt_target", &PenaltyConfig::kkt_target);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("alpha", &SolveResult::alpha)
      .def_property_readonly("status",
                             [](const SolveResult& r) { return to_string(r.status); })
      .def_readonly("outer_iterations", &SolveResult::outer_iterations)
      .def_readonly("total_inner_iterations", &SolveResult::total_inner_iterations)
      .def_readonly("feasibility", &SolveResult::feasibility)
      .def_readonly("flags", &SolveResult::flags)
      .def_readonly("kkt", &SolveResult::kkt)
      .def_readonly("wall_time_seconds", &SolveResult::wall_time_seconds)
      .def("to_json", [](const SolveResult& r) { return solve_result_to_json(r).dump(); })
      .def("trace_jsonl", [](const SolveResult& r) {
        std::string out;
        for (const auto& rec : r.trace) out += trace_record_to_json(rec).dump() + "\n";
        return out;
      });
  m.def("penalty_solve",
        [](const DiscreteModel& model, const PenaltyConfig& pcfg, const NpgConfig& ncfg) {
          return penalty_solve(model, pcfg, ncfg);
        },
        py::arg("model"), py::arg("penalty") = PenaltyConfig{}, py::arg("npg") = NpgConfig{});

  py::class_<KktReport>(m, "KktReport")
      .def_readonly("nu", &KktReport::nu)
      .def_readonly("stationarity_residuals", &KktReport::stationarity_residuals)
      .def_readonly("max_residual", &KktReport::max_residual)
      .def_readonly("complementarity", &KktReport::complementarity)
      .def_readonly("feasibility", &KktReport::feasibility)
      .def_readonly("degenerate", &KktReport::degenerate)
      .def("to_json", [](const KktReport& r) { return kkt_report_to_json(r).dump(); });
  m.def("kkt_report", &kkt_report, py::arg("alpha"), py::arg("model"));
  m.def("support", &support, py::arg("alpha"), py::arg("threshold"));
  m.def("default_support_threshold", &default_support_threshold, py::arg("alpha"));

  m.def("gen_true_coeffs",
        [](int band_limit, const std::vector<int>& support_degrees,
           std::optional<int> support_count, const std::map<int, double>& magnitude_profile,
           std::uint64_t seed) {
          SynthSpec spec;
          spec.band_limit = band_limit;
          spec.support = support_degrees;
          spec.support_count = support_count;
          spec.magnitude_profile = magnitude_profile;
          spec.seed = seed;
          return gen_true_coeffs(spec);
        },
        py::arg("band_limit"), py::arg("support") = std::vector<int>{},
        py::arg("support_count") = std::nullopt,
        py::arg("magnitude_profile") = std::map<int, double>{}, py::arg("seed") = 1);
  m.def("gen_noise", &gen_noise, py::arg("grid"), py::arg("delta"), py::arg("seed"));
  m.def("observe", &observe, py::arg("truth"), py::arg("mask"), py::arg("noise"),
        py::arg("grid"));

  m.def("rel_err", &rel_err, py::arg("est"), py::arg("truth"));
  m.def("snr_db",
        [](const CVec& field_true, const CVec& field_est, const SphereGrid& grid) {
          bool capped = false;
          const double value = snr_db(field_true, field_est, grid, &capped);
          return py::make_tuple(value, capped);
        },
        py::arg("field_true"), py::arg("field_est"), py::arg("grid"));

  py::class_<RecoveryReport>(m, "RecoveryReport")
      .def_readonly("rel_err", &RecoveryReport::rel_err)
      .def_readonly("snr_db", &RecoveryReport::snr_db)
      .def_readonly("snr_capped", &RecoveryReport::snr_capped)
      .def_readonly("group_l0", &RecoveryReport::group_l0)
      .def_readonly("nnz", &RecoveryReport::nnz)
      .def_readonly("false_positives", &RecoveryReport::false_positives)
      .def_readonly("support_true", &RecoveryReport::support_true)
      .def_readonly("support_est", &RecoveryReport::support_est)
      .def("to_json", [](const RecoveryReport& r) { return recovery_report_to_json(r).dump(); })
      .def("table_row", &recovery_report_table_row);
  m.def("recovery_report", &recovery_report, py::arg("est"), py::arg("truth"), py::arg("grid"),
        py::arg("threshold"));
  m.def("recovery_report_table_header", &recovery_report_table_header);

  m.def("write_coeffs_csv", &write_coeffs_csv, py::arg("path"), py::arg("coeffs"));
  m.def("read_coeffs_csv", &read_coeffs_csv, py::arg("path"));

  py::class_<ExperimentArtifacts>(m, "ExperimentArtifacts")
      .def_readonly("grid", &ExperimentArtifacts::grid)
      .def_readonly("mask", &ExperimentArtifacts::mask)
      .def_readonly("truth", &ExperimentArtifacts::truth)
      .def_readonly("noise", &ExperimentArtifacts::noise)
      .def_readonly("observed", &ExperimentArtifacts::observed)
      .def_readonly("rho", &ExperimentArtifacts::rho)
      .def_readonly("model", &ExperimentArtifacts::model)
      .def_readonly("solve", &ExperimentArtifacts::solve)
      .def_readonly("report", &ExperimentArtifacts::report)
      .def_readonly("warnings", &ExperimentArtifacts::warnings);
  m.def("run_experiment",
        [](const std::string& config_json) {
          return run_experiment(experiment_config_from_json(parse_json(config_json)));
        },
        py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
  m.def("normalize_config", [](const std::string& config_json) {
    return experiment_config_to_json(experiment_config_from_json(parse_json(config_json)))
        .dump(2);
  });

  m.def("render_equirect",
        [](const CoefficientVector& coeffs, int rows, int cols) {
          return render_equirect(coeffs, rows, cols);
        },
        py::arg("coeffs"), py::arg("rows"), py::arg("cols"));
}
