#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "sphinpaint/grid.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Ground-truth generator parameters.  Exactly one of `support` (explicit
// degrees) or `support_count` (degrees drawn without replacement from
// {0..band_limit}) selects the nonzero groups.  magnitude_profile scales each
// support degree (default 1); the result is normalized to ||alpha|| = 1 and is
// conjugate-symmetric, so the synthesized field is real.
struct SynthSpec {
  int band_limit = 0;
  std::vector<int> support;
  std::optional<int> support_count;
  std::map<int, double> magnitude_profile;
  std::uint64_t seed = 1;
};

CoefficientVector gen_true_coeffs(const SynthSpec& spec);

// Real white noise on the grid nodes: delta * N(0,1) draws in node order.
RVec gen_noise(const SphereGrid& grid, double delta, std::uint64_t seed);

// Quadrature L2 norm sqrt(sum_j w_j x_j^2) of a real node field.
double field_l2_norm(const RVec& field, const SphereGrid& grid);

// Rescales `noise` in place so that its quadrature L2 norm equals
// ratio * ||reference||; returns the scale factor applied.
double scale_noise_to_ratio(RVec& noise, const SphereGrid& grid, const CVec& reference,
                            double ratio);

// Observed field 1_Gamma * synthesize(truth) + noise (noise everywhere).
CVec observe(const CoefficientVector& truth, const Mask& mask, const RVec& noise,
             const SphereGrid& grid);

}  // namespace sphinpaint
