#include "sphinpaint/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sphinpaint/harmonics.hpp"

namespace sphinpaint {

namespace {

constexpr double kPi = std::numbers::pi;

// Unit vector for (theta, phi).
std::array<double, 3> unit_vec(double theta, double phi) {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// phi reduced to [0, 2*pi).
double wrap_phi(double phi) {
  const double two_pi = 2.0 * kPi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

std::string shape_kind_name(ShapeKind k) {
  switch (k) {
    case ShapeKind::polar_cap: return "polar_cap";
    case ShapeKind::latitude_band: return "latitude_band";
    case ShapeKind::longitude_sector: return "longitude_sector";
  }
  return "?";
}

ShapeKind shape_kind_from_name(const std::string& name) {
  if (name == "polar_cap") return ShapeKind::polar_cap;
  if (name == "latitude_band") return ShapeKind::latitude_band;
  if (name == "longitude_sector") return ShapeKind::longitude_sector;
  throw ConfigError("unknown mask shape kind '" + name + "'");
}

MaskShape cap(double center_colat, double center_lon, double radius) {
  MaskShape s;
  s.kind = ShapeKind::polar_cap;
  s.center_colatitude = center_colat;
  s.center_longitude = center_lon;
  s.angular_radius = radius;
  return s;
}

MaskShape band(double theta_min, double theta_max) {
  MaskShape s;
  s.kind = ShapeKind::latitude_band;
  s.theta_min = theta_min;
  s.theta_max = theta_max;
  return s;
}

}  // namespace

SphereGrid build_grid(int band_limit) {
  if (band_limit < 0) throw ConfigError("band limit must be nonnegative");
  const int L = band_limit;
  // n_theta = ceil((2L+2)/2) + margin Gauss-Legendre nodes make products of two
  // degree-<=L harmonics (polynomials of degree <= 2L in cos theta) exact;
  // 2L+2 uniform longitudes kill every Fourier mode |m - m'| <= 2L+1.
  const int margin = 2;
  const int n_theta = (2 * L + 2) / 2 + margin;
  const int n_phi = 2 * L + 2;

  SphereGrid grid;
  grid.supported_band_limit = L;
  const QuadratureRule rule = gauss_legendre_rule(n_theta);
  grid.colatitudes.resize(n_theta);
  for (int i = 0; i < n_theta; ++i)
    grid.colatitudes[i] = std::acos(rule.nodes[n_theta - 1 - i]);  // theta ascending
  grid.longitudes.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) grid.longitudes[j] = 2.0 * kPi * j / n_phi;

  grid.weights.resize(static_cast<Eigen::Index>(n_theta) * n_phi);
  const double phi_weight = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double w = rule.weights[n_theta - 1 - i] * phi_weight;
    grid.weights.segment(static_cast<Eigen::Index>(i) * n_phi, n_phi).setConstant(w);
  }
  return grid;
}

bool MaskShape::contains(double theta, double phi) const {
  switch (kind) {
    case ShapeKind::polar_cap: {
      const double c = dot3(unit_vec(theta, phi), unit_vec(center_colatitude, center_longitude));
      return std::acos(std::clamp(c, -1.0, 1.0)) <= angular_radius;
    }
    case ShapeKind::latitude_band:
      return theta >= theta_min && theta <= theta_max;
    case ShapeKind::longitude_sector: {
      if (theta < theta_min || theta > theta_max) return false;
      const double p = wrap_phi(phi);
      const double lo = wrap_phi(phi_min);
      const double hi = wrap_phi(phi_max);
      if (lo <= hi) return p >= lo && p <= hi;
      return p >= lo || p <= hi;  // sector wraps through 0
    }
  }
  return false;
}

MaskSpec parse_mask_spec(const nlohmann::json& j) {
  MaskSpec spec;
  if (!j.is_object()) throw ConfigError("mask spec must be a JSON object");
  spec.complement = j.value("complement", true);
  if (j.contains("shapes")) {
    if (!j.at("shapes").is_array()) throw ConfigError("mask spec 'shapes' must be an array");
    for (const auto& js : j.at("shapes")) {
      MaskShape s;
      s.kind = shape_kind_from_name(js.at("kind").get<std::string>());
      switch (s.kind) {
        case ShapeKind::polar_cap:
          s.center_colatitude = js.at("center_colatitude").get<double>();
          s.center_longitude = js.at("center_longitude").get<double>();
          s.angular_radius = js.at("angular_radius").get<double>();
          if (s.angular_radius < 0.0) throw ConfigError("cap angular_radius must be >= 0");
          break;
        case ShapeKind::latitude_band:
          s.theta_min = js.at("theta_min").get<double>();
          s.theta_max = js.at("theta_max").get<double>();
          break;
        case ShapeKind::longitude_sector:
          s.theta_min = js.at("theta_min").get<double>();
          s.theta_max = js.at("theta_max").get<double>();
          s.phi_min = js.at("phi_min").get<double>();
          s.phi_max = js.at("phi_max").get<double>();
          break;
      }
      spec.shapes.push_back(s);
    }
  }
  return spec;
}

nlohmann::json mask_spec_to_json(const MaskSpec& spec) {
  nlohmann::json j;
  j["complement"] = spec.complement;
  j["shapes"] = nlohmann::json::array();
  for (const auto& s : spec.shapes) {
    nlohmann::json js;
    js["kind"] = shape_kind_name(s.kind);
    switch (s.kind) {
      case ShapeKind::polar_cap:
        js["center_colatitude"] = s.center_colatitude;
        js["center_longitude"] = s.center_longitude;
        js["angular_radius"] = s.angular_radius;
        break;
      case ShapeKind::latitude_band:
        js["theta_min"] = s.theta_min;
        js["theta_max"] = s.theta_max;
        break;
      case ShapeKind::longitude_sector:
        js["theta_min"] = s.theta_min;
        js["theta_max"] = s.theta_max;
        js["phi_min"] = s.phi_min;
        js["phi_max"] = s.phi_max;
        break;
    }
    j["shapes"].push_back(js);
  }
  return j;
}

MaskSpec preset_mask_spec(const std::string& name) {
  MaskSpec spec;
  spec.complement = true;
  if (name == "equatorial_band") {
    spec.shapes = {band(kPi / 2 - 0.1, kPi / 2 + 0.1)};
  } else if (name == "banded_caps") {
    spec.shapes = {band(kPi / 2 - 0.1, kPi / 2 + 0.1), cap(0.9, 1.2, 0.3), cap(2.0, 4.0, 0.3)};
  } else if (name == "polar_cap") {
    spec.shapes = {cap(0.0, 0.0, 25.0 * kPi / 180.0)};
  } else if (name == "offaxis_cap") {
    spec.shapes = {cap(2.0, 3.6, 0.3)};
  } else {
    throw ConfigError("unknown mask preset '" + name + "'");
  }
  return spec;
}

std::vector<std::string> preset_mask_names() {
  return {"equatorial_band", "banded_caps", "polar_cap", "offaxis_cap"};
}

Mask build_mask(const MaskSpec& spec, const SphereGrid& grid) {
  Mask mask;
  mask.spec = spec;
  const int n = grid.n_nodes();
  mask.observed.resize(n);
  for (int j = 0; j < n; ++j) {
    bool in_union = false;
    for (const auto& s : spec.shapes) {
      if (s.contains(grid.theta(j), grid.phi(j))) {
        in_union = true;
        break;
      }
    }
    const bool observed = spec.complement ? !in_union : in_union;
    mask.observed[j] = observed ? 1 : 0;
    if (observed) ++mask.n_observed;
  }
  if (mask.n_observed == 0)
    throw ConfigError("mask leaves no observed nodes (Gamma is empty)");

  // The observed set must contain an open cap at least as large as the grid
  // spacing: some observed node whose whole spacing-neighborhood is observed.
  double max_dtheta = std::max(grid.colatitudes.front(), kPi - grid.colatitudes.back());
  for (int i = 1; i < grid.n_theta(); ++i)
    max_dtheta = std::max(max_dtheta, grid.colatitudes[i] - grid.colatitudes[i - 1]);
  const double spacing = std::max(max_dtheta, 2.0 * kPi / grid.n_phi());
  const double cos_spacing = std::cos(spacing);

  std::vector<std::array<double, 3>> vecs(n);
  for (int j = 0; j < n; ++j) vecs[j] = unit_vec(grid.theta(j), grid.phi(j));
  bool has_cap = false;
  for (int c = 0; c < n && !has_cap; ++c) {
    if (!mask.observed[c]) continue;
    bool ok = true;
    for (int q = 0; q < n; ++q) {
      if (!mask.observed[q] && dot3(vecs[c], vecs[q]) >= cos_spacing) {
        ok = false;
        break;
      }
    }
    has_cap = ok;
  }
  if (!has_cap)
    throw ConfigError(
        "observed region contains no open cap of radius >= the grid spacing; "
        "the mask hides too much of the sphere");
  return mask;
}

double region_area(const Mask& mask, const SphereGrid& grid) {
  if (mask.n_nodes() != grid.n_nodes())
    throw ConfigError("mask and grid node counts differ");
  double area = 0.0;
  for (int j = 0; j < grid.n_nodes(); ++j)
    if (mask.observed[j]) area += grid.weights(j);
  return area;
}

}  // namespace sphinpaint
