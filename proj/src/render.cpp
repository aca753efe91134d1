#include "sphinpaint/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <png.h>

#include "sphinpaint/harmonics.hpp"

namespace sphinpaint {

namespace {

constexpr double kPi = std::numbers::pi;

void check_resolution(int rows, int cols) {
  if (rows < 2 || cols < 1)
    throw ConfigError("render resolution needs at least 2 rows and 1 column");
}

}  // namespace

Eigen::MatrixXd render_equirect(const CoefficientVector& coeffs, int rows, int cols) {
  check_resolution(rows, cols);
  std::vector<double> phis(cols);
  for (int j = 0; j < cols; ++j) phis[j] = 2.0 * kPi * j / cols;
  Eigen::MatrixXd img(rows, cols);
  CMat ylm_rows;
  for (int i = 0; i < rows; ++i) {
    const double theta = kPi * i / (rows - 1);
    ylm_theta_rows(coeffs.band_limit(), theta, phis, ylm_rows);
    img.row(i) = (ylm_rows * coeffs.flat()).real();
  }
  return img;
}

Eigen::MatrixXd render_equirect(const FieldSamples& samples, int rows, int cols) {
  check_resolution(rows, cols);
  const std::size_t n = samples.thetas.size();
  if (n == 0) throw ConfigError("cannot render an empty field sample set");
  Eigen::MatrixXd img(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const double theta = kPi * i / (rows - 1);
    for (int j = 0; j < cols; ++j) {
      const double phi = 2.0 * kPi * j / cols;
      // Nearest sample by great-circle distance (small sample sets only come
      // from product grids, so a linear scan per pixel is acceptable).
      double best = -2.0;
      std::size_t best_idx = 0;
      const double ct = std::cos(theta), st = std::sin(theta);
      for (std::size_t s = 0; s < n; ++s) {
        const double dot = ct * std::cos(samples.thetas[s]) +
                           st * std::sin(samples.thetas[s]) * std::cos(phi - samples.phis[s]);
        if (dot > best) {
          best = dot;
          best_idx = s;
        }
      }
      img(i, j) = samples.values(static_cast<Eigen::Index>(best_idx)).real();
    }
  }
  return img;
}

RenderResult write_grayscale_png(const std::string& path, const Eigen::MatrixXd& values) {
  const int rows = static_cast<int>(values.rows());
  const int cols = static_cast<int>(values.cols());
  if (rows < 1 || cols < 1) throw ConfigError("cannot write an empty image");

  RenderResult result;
  result.rows = rows;
  result.cols = cols;
  result.min_value = values.minCoeff();
  result.max_value = values.maxCoeff();
  const double range = result.max_value - result.min_value;

  std::vector<png_byte> pixels(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double v = range > 0.0 ? (values(i, j) - result.min_value) / range : 0.5;
      pixels[static_cast<std::size_t>(i) * cols + j] =
          static_cast<png_byte>(std::clamp(std::lround(v * 255.0), 0L, 255L));
    }

  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open '" + path + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng write failure on '" + path + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int i = 0; i < rows; ++i)
    png_write_row(png, pixels.data() + static_cast<std::size_t>(i) * cols);
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw IoError("close failure on '" + path + "'");
  return result;
}

}  // namespace sphinpaint
