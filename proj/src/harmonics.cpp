#include "sphinpaint/harmonics.hpp"

#include <cmath>
#include <numbers>

namespace sphinpaint {

namespace {

constexpr double kPi = std::numbers::pi;

// Legendre polynomial P_n and derivative at x via the three-term recurrence.
void legendre_poly(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = p0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw ConfigError("quadrature rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Standard initial guess for the i-th root (descending), then Newton.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_poly(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre_poly(n, x, p, dp);
    rule.nodes[n - 1 - i] = x;  // store ascending
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

std::vector<double> normalized_assoc_legendre(int band_limit, double x) {
  if (band_limit < 0) throw ConfigError("band limit must be nonnegative");
  if (!(x >= -1.0 && x <= 1.0)) throw ConfigError("Legendre argument outside [-1, 1]");
  const int L = band_limit;
  std::vector<double> table(legendre_index(L, L) + 1);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));  // sin(theta)

  table[legendre_index(0, 0)] = 1.0 / std::sqrt(4.0 * kPi);
  // Sectoral chain Pbar_m^m, Condon-Shortley sign folded in.
  for (int m = 1; m <= L; ++m) {
    table[legendre_index(m, m)] =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * table[legendre_index(m - 1, m - 1)];
  }
  for (int m = 0; m < L; ++m) {
    table[legendre_index(m + 1, m)] =
        std::sqrt(2.0 * m + 3.0) * x * table[legendre_index(m, m)];
    for (int l = m + 2; l <= L; ++l) {
      const double a =
          std::sqrt((2.0 * l - 1.0) * (2.0 * l + 1.0) / ((l - m) * static_cast<double>(l + m)));
      const double b = std::sqrt((2.0 * l + 1.0) * (l - 1.0 - m) * (l - 1.0 + m) /
                                 ((2.0 * l - 3.0) * (l - m) * static_cast<double>(l + m)));
      table[legendre_index(l, m)] =
          a * x * table[legendre_index(l - 1, m)] - b * table[legendre_index(l - 2, m)];
    }
  }
  return table;
}

Complex eval_ylm(HarmonicIndex lm, double theta, double phi) {
  const int l = lm.l, m = lm.m;
  if (l < 0 || std::abs(m) > l) throw ConfigError("invalid harmonic index");
  const auto table = normalized_assoc_legendre(l, std::cos(theta));
  const int am = std::abs(m);
  double v = table[legendre_index(l, am)];
  if (m < 0 && (am % 2) != 0) v = -v;  // Y_{l,-m} = (-1)^m conj(Y_{l,m})
  return v * std::exp(Complex(0.0, m * phi));
}

void ylm_point(int band_limit, double theta, double phi, CVec& out) {
  const int L = band_limit;
  out.resize(coeff_dim(L));
  const auto table = normalized_assoc_legendre(L, std::cos(theta));
  std::vector<Complex> phase(L + 1);
  phase[0] = 1.0;
  const Complex e1 = std::exp(Complex(0.0, phi));
  for (int m = 1; m <= L; ++m) phase[m] = phase[m - 1] * e1;
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double v = table[legendre_index(l, m)];
      out(flat_index(l, m)) = v * phase[m];
      if (m > 0) {
        const double sign = (m % 2 != 0) ? -1.0 : 1.0;
        out(flat_index(l, -m)) = sign * v * std::conj(phase[m]);
      }
    }
  }
}

void ylm_theta_rows(int band_limit, double theta, const std::vector<double>& phis, CMat& out) {
  const int L = band_limit;
  const int dim = coeff_dim(L);
  out.resize(static_cast<Eigen::Index>(phis.size()), dim);
  const auto table = normalized_assoc_legendre(L, std::cos(theta));
  std::vector<Complex> phase(L + 1);
  for (std::size_t i = 0; i < phis.size(); ++i) {
    phase[0] = 1.0;
    const Complex e1 = std::exp(Complex(0.0, phis[i]));
    for (int m = 1; m <= L; ++m) phase[m] = phase[m - 1] * e1;
    for (int l = 0; l <= L; ++l) {
      for (int m = 0; m <= l; ++m) {
        const double v = table[legendre_index(l, m)];
        out(i, flat_index(l, m)) = v * phase[m];
        if (m > 0) {
          const double sign = (m % 2 != 0) ? -1.0 : 1.0;
          out(i, flat_index(l, -m)) = sign * v * std::conj(phase[m]);
        }
      }
    }
  }
}

CVec synthesize(const CoefficientVector& coeffs, const SphereGrid& grid) {
  const int n_phi = grid.n_phi();
  CVec field(grid.n_nodes());
  CMat rows;
  for (int it = 0; it < grid.n_theta(); ++it) {
    ylm_theta_rows(coeffs.band_limit(), grid.colatitudes[it], grid.longitudes, rows);
    field.segment(static_cast<Eigen::Index>(it) * n_phi, n_phi).noalias() = rows * coeffs.flat();
  }
  return field;
}

CoefficientVector analyze(const CVec& field, const SphereGrid& grid, int band_limit) {
  if (field.size() != grid.n_nodes())
    throw ConfigError("field has " + std::to_string(field.size()) + " values, grid has " +
                      std::to_string(grid.n_nodes()) + " nodes");
  if (grid.supported_band_limit < band_limit)
    throw ConfigError("grid supports band limit " + std::to_string(grid.supported_band_limit) +
                      ", analysis to degree " + std::to_string(band_limit) +
                      " needs a finer grid");
  const int n_phi = grid.n_phi();
  CVec flat = CVec::Zero(coeff_dim(band_limit));
  CMat rows;
  for (int it = 0; it < grid.n_theta(); ++it) {
    ylm_theta_rows(band_limit, grid.colatitudes[it], grid.longitudes, rows);
    const auto seg = static_cast<Eigen::Index>(it) * n_phi;
    const CVec wf =
        grid.weights.segment(seg, n_phi).cast<Complex>().cwiseProduct(field.segment(seg, n_phi));
    flat.noalias() += rows.adjoint() * wf;
  }
  return CoefficientVector(band_limit, std::move(flat));
}

}  // namespace sphinpaint
