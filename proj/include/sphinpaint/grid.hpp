#pragma once

#include <cstdint>

#include <json.hpp>

#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Product quadrature grid on the unit sphere: Gauss-Legendre nodes in
// cos(theta) crossed with uniform longitudes.  Node j corresponds to
// colatitude row j / n_phi and longitude column j % n_phi (theta-major).
// Weights include the 2*pi/n_phi longitude factor and sum to 4*pi.
struct SphereGrid {
  std::vector<double> colatitudes;  // ascending, in (0, pi)
  std::vector<double> longitudes;   // phi_j = 2*pi*j / n_phi, in [0, 2*pi)
  RVec weights;                     // one per node, theta-major
  int supported_band_limit = 0;     // products of degree <= 2*L integrate exactly

  int n_theta() const { return static_cast<int>(colatitudes.size()); }
  int n_phi() const { return static_cast<int>(longitudes.size()); }
  int n_nodes() const { return n_theta() * n_phi(); }
  double theta(int node) const { return colatitudes[node / n_phi()]; }
  double phi(int node) const { return longitudes[node % n_phi()]; }
};

// Grid sized for exact quadrature of degree <= 2L integrands (plus margin).
SphereGrid build_grid(int band_limit);

enum class ShapeKind { polar_cap, latitude_band, longitude_sector };

// One region primitive.  polar_cap uses {center_colatitude, center_longitude,
// angular_radius}; latitude_band uses [theta_min, theta_max]; longitude_sector
// additionally restricts phi to [phi_min, phi_max] (wrapping when
// phi_min > phi_max).  All boundaries are closed.
struct MaskShape {
  ShapeKind kind = ShapeKind::polar_cap;
  double center_colatitude = 0.0;
  double center_longitude = 0.0;
  double angular_radius = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;

  bool contains(double theta, double phi) const;
};

// Union of shapes plus a complement flag.  With complement=true the listed
// region is the hidden part Gamma^c and the observed set is its complement;
// with complement=false the listed region itself is observed.
struct MaskSpec {
  std::vector<MaskShape> shapes;
  bool complement = true;
};

MaskSpec parse_mask_spec(const nlohmann::json& j);
nlohmann::json mask_spec_to_json(const MaskSpec& spec);

// Named parametric presets (hidden-region geometry, complement=true):
//   equatorial_band  - band |theta - pi/2| <= 0.1
//   banded_caps      - the same band plus caps r=0.3 at (0.9,1.2) and (2.0,4.0)
//   polar_cap        - cap of angular radius 25 degrees at the north pole
//   offaxis_cap      - cap r=0.3 at (theta,phi) = (2.0,3.6)
MaskSpec preset_mask_spec(const std::string& name);
std::vector<std::string> preset_mask_names();

// Node-level indicator of the observed region Gamma.
struct Mask {
  std::vector<std::uint8_t> observed;  // 1 = node in Gamma
  MaskSpec spec;
  int n_observed = 0;

  bool is_observed(int node) const { return observed[node] != 0; }
  int n_nodes() const { return static_cast<int>(observed.size()); }
};

// Evaluates the spec on every grid node.  Rejects masks whose observed set is
// empty or lacks a cap-sized open region (radius >= the grid spacing).
Mask build_mask(const MaskSpec& spec, const SphereGrid& grid);

// Quadrature area of the observed region Gamma.
double region_area(const Mask& mask, const SphereGrid& grid);

}  // namespace sphinpaint
