#include "sphinpaint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sphinpaint/harmonics.hpp"

namespace sphinpaint {

CoefficientVector gen_true_coeffs(const SynthSpec& spec) {
  if (spec.band_limit < 0) throw ConfigError("band limit must be nonnegative");
  if (!spec.support.empty() && spec.support_count)
    throw ConfigError("give either an explicit support or a support count, not both");
  if (spec.support.empty() && !spec.support_count)
    throw ConfigError("truth generator needs a support set or a support count");

  std::mt19937_64 rng(spec.seed);
  std::vector<int> degrees = spec.support;
  if (spec.support_count) {
    const int count = *spec.support_count;
    if (count < 1 || count > spec.band_limit + 1)
      throw ConfigError("support count must lie in [1, band_limit + 1]");
    std::vector<int> all(spec.band_limit + 1);
    for (int l = 0; l <= spec.band_limit; ++l) all[l] = l;
    // Fisher-Yates prefix shuffle; draw order fixed for determinism.
    for (int i = 0; i < count; ++i) {
      std::uniform_int_distribution<int> pick(i, spec.band_limit);
      std::swap(all[i], all[pick(rng)]);
    }
    degrees.assign(all.begin(), all.begin() + count);
    std::sort(degrees.begin(), degrees.end());
  } else {
    std::sort(degrees.begin(), degrees.end());
    degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    for (int l : degrees)
      if (l < 0 || l > spec.band_limit)
        throw ConfigError("support degree " + std::to_string(l) + " outside [0, band_limit]");
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  CoefficientVector alpha(spec.band_limit);
  for (int l : degrees) {
    double scale = 1.0;
    if (auto it = spec.magnitude_profile.find(l); it != spec.magnitude_profile.end())
      scale = it->second;
    // m = 0 real, m > 0 complex Gaussian; m < 0 fixed by conjugate symmetry
    // alpha_{l,-m} = (-1)^m conj(alpha_{l,m}), so the field is real.
    alpha.at(l, 0) = scale * gauss(rng);
    for (int m = 1; m <= l; ++m) {
      const double re = gauss(rng), im = gauss(rng);
      const Complex z = scale * Complex(re, im) / std::sqrt(2.0);
      alpha.at(l, m) = z;
      alpha.at(l, -m) = (m % 2 != 0 ? -1.0 : 1.0) * std::conj(z);
    }
  }
  const double norm = alpha.flat().norm();
  if (norm == 0.0) throw ConfigError("degenerate truth draw with zero norm");
  alpha.flat() /= norm;
  return alpha;
}

RVec gen_noise(const SphereGrid& grid, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw ConfigError("noise level delta must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RVec noise(grid.n_nodes());
  for (int j = 0; j < grid.n_nodes(); ++j) noise(j) = delta * gauss(rng);
  return noise;
}

double field_l2_norm(const RVec& field, const SphereGrid& grid) {
  if (field.size() != grid.n_nodes())
    throw ConfigError("field and grid node counts differ");
  return std::sqrt(field.cwiseAbs2().dot(grid.weights));
}

double scale_noise_to_ratio(RVec& noise, const SphereGrid& grid, const CVec& reference,
                            double ratio) {
  if (!(ratio >= 0.0)) throw ConfigError("noise ratio must be nonnegative");
  if (reference.size() != grid.n_nodes())
    throw ConfigError("reference field and grid node counts differ");
  double ref2 = 0.0;
  for (int j = 0; j < grid.n_nodes(); ++j) ref2 += grid.weights(j) * std::norm(reference(j));
  const double cur = field_l2_norm(noise, grid);
  if (cur == 0.0) {
    if (ratio == 0.0) return 1.0;
    throw ConfigError("cannot rescale an identically zero noise field");
  }
  const double scale = ratio * std::sqrt(ref2) / cur;
  noise *= scale;
  return scale;
}

CVec observe(const CoefficientVector& truth, const Mask& mask, const RVec& noise,
             const SphereGrid& grid) {
  if (mask.n_nodes() != grid.n_nodes()) throw ConfigError("mask and grid node counts differ");
  if (noise.size() != grid.n_nodes()) throw ConfigError("noise and grid node counts differ");
  CVec field = synthesize(truth, grid);
  for (int j = 0; j < grid.n_nodes(); ++j) {
    if (!mask.observed[j]) field(j) = 0.0;
    field(j) += noise(j);
  }
  return field;
}

}  // namespace sphinpaint
