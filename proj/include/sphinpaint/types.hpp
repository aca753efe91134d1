#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sphinpaint {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Invalid user-supplied configuration, arguments, or domain violations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File-format and filesystem failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degree/order pair (l, m) with |m| <= l.
struct HarmonicIndex {
  int l = 0;
  int m = 0;
};

// Flat position of (l, m) in the degree-major coefficient layout.
inline int flat_index(int l, int m) { return l * l + l + m; }
inline int flat_index(HarmonicIndex lm) { return flat_index(lm.l, lm.m); }

// Number of coefficients up to and including degree `band_limit`.
inline int coeff_dim(int band_limit) { return (band_limit + 1) * (band_limit + 1); }

// Complex spherical-harmonic coefficients up to a band limit, stored flat in
// degree-major order; degree l occupies the contiguous block [l^2, l^2 + 2l]
// with orders m = -l..l.
class CoefficientVector {
 public:
  CoefficientVector() = default;

  explicit CoefficientVector(int band_limit) : band_limit_(check_limit(band_limit)) {
    flat_ = CVec::Zero(coeff_dim(band_limit));
  }

  CoefficientVector(int band_limit, CVec values) : band_limit_(check_limit(band_limit)) {
    if (values.size() != coeff_dim(band_limit))
      throw ConfigError("coefficient vector has " + std::to_string(values.size()) +
                        " entries, expected " + std::to_string(coeff_dim(band_limit)));
    flat_ = std::move(values);
  }

  int band_limit() const { return band_limit_; }
  int dim() const { return static_cast<int>(flat_.size()); }

  const CVec& flat() const { return flat_; }
  CVec& flat() { return flat_; }

  Complex at(int l, int m) const {
    check_index(l, m);
    return flat_(flat_index(l, m));
  }
  Complex& at(int l, int m) {
    check_index(l, m);
    return flat_(flat_index(l, m));
  }

  // View of the degree-l group (2l+1 entries, orders -l..l).
  auto group(int l) { return flat_.segment(l * l, 2 * l + 1); }
  auto group(int l) const { return flat_.segment(l * l, 2 * l + 1); }

  double group_norm(int l) const { return group(l).norm(); }

 private:
  static int check_limit(int band_limit) {
    if (band_limit < 0) throw ConfigError("band limit must be nonnegative");
    return band_limit;
  }
  void check_index(int l, int m) const {
    if (l < 0 || l > band_limit_ || std::abs(m) > l)
      throw ConfigError("harmonic index (" + std::to_string(l) + "," + std::to_string(m) +
                        ") outside band limit " + std::to_string(band_limit_));
  }

  int band_limit_ = -1;
  CVec flat_;
};

// Per-degree penalty weights beta_0 = 1, beta_l = eta^l * l^p for l >= 1.
struct DegreeWeights {
  double p = 0.5;
  double eta = 1.0;
  std::vector<double> values;

  static DegreeWeights make(int band_limit, double p, double eta) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("group exponent p must lie in (0, 1)");
    if (!(eta > 0.0)) throw ConfigError("weight growth factor eta must be positive");
    DegreeWeights w;
    w.p = p;
    w.eta = eta;
    w.values.resize(band_limit + 1);
    w.values[0] = 1.0;
    for (int l = 1; l <= band_limit; ++l) w.values[l] = std::pow(eta, l) * std::pow(l, p);
    return w;
  }
};

}  // namespace sphinpaint
