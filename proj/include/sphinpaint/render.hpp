#pragma once

#include <string>

#include "sphinpaint/coeff_io.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Real part of the synthesized field on an equirectangular image grid:
// row 0 is the north pole (theta = 0), row rows-1 the south pole, and column j
// is longitude 2*pi*j / cols.
Eigen::MatrixXd render_equirect(const CoefficientVector& coeffs, int rows, int cols);

// Nearest-node resampling of scattered field samples onto the same image grid.
Eigen::MatrixXd render_equirect(const FieldSamples& samples, int rows, int cols);

// Min-max normalization metadata recorded in the PNG sidecar.
struct RenderResult {
  int rows = 0;
  int cols = 0;
  double min_value = 0.0;
  double max_value = 0.0;
};

// 8-bit grayscale PNG with min-max normalization (flat images map to 128).
RenderResult write_grayscale_png(const std::string& path, const Eigen::MatrixXd& values);

}  // namespace sphinpaint
