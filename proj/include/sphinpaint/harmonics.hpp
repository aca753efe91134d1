#pragma once

#include "sphinpaint/grid.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Gauss-Legendre quadrature on [-1, 1]; nodes ascending, weights sum to 2,
// exact for polynomials of degree <= 2n - 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre_rule(int n);

// Packed index for the triangular table of (l, m) with 0 <= m <= l.
inline int legendre_index(int l, int m) { return l * (l + 1) / 2 + m; }

// Fully normalized associated Legendre values Pbar_l^m(x) for 0 <= m <= l <= L,
// Condon-Shortley phase included, normalized so that
// Y_{l,m}(theta, phi) = Pbar_l^m(cos theta) * e^{i m phi} is orthonormal with
// respect to the surface measure (2*pi * int_{-1}^{1} Pbar^2 dx = 1).
// Computed with the standard three-term recurrence; no factorials.
std::vector<double> normalized_assoc_legendre(int band_limit, double x);

// Single orthonormal harmonic Y_{l,m}(theta, phi); negative orders via
// Y_{l,-m} = (-1)^m * conj(Y_{l,m}).
Complex eval_ylm(HarmonicIndex lm, double theta, double phi);

// All Y_k at one point in flat degree-major order (row of the synthesis matrix).
void ylm_point(int band_limit, double theta, double phi, CVec& out);

// Rows of the synthesis matrix for one colatitude and a list of longitudes:
// out(i, k) = Y_k(theta, phis[i]).  `out` is resized to phis.size() x dim.
void ylm_theta_rows(int band_limit, double theta, const std::vector<double>& phis, CMat& out);

// Field values T(x_j) = sum_k alpha_k Y_k(x_j) at every grid node.
CVec synthesize(const CoefficientVector& coeffs, const SphereGrid& grid);

// Quadrature projections alpha_k = sum_j w_j f(x_j) conj(Y_k(x_j)).
// Requires grid.supported_band_limit >= band_limit.
CoefficientVector analyze(const CVec& field, const SphereGrid& grid, int band_limit);

}  // namespace sphinpaint
