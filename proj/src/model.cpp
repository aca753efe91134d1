#include "sphinpaint/model.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>

#include "sphinpaint/harmonics.hpp"

namespace sphinpaint {

namespace {

constexpr char kModelMagic[8] = {'S', 'P', 'H', 'M', 'O', 'D', 'L', '1'};

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n, const std::string& what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!in) throw IoError("model file truncated while reading " + what);
}

}  // namespace

CMat assemble_gram(const SphereGrid& grid, const Mask& mask, int band_limit) {
  if (grid.supported_band_limit < band_limit)
    throw ConfigError("grid supports band limit " + std::to_string(grid.supported_band_limit) +
                      ", Gram assembly to degree " + std::to_string(band_limit) +
                      " needs a finer grid");
  if (mask.n_nodes() != grid.n_nodes()) throw ConfigError("mask and grid node counts differ");
  const int dim = coeff_dim(band_limit);
  const int n_phi = grid.n_phi();
  CMat gram = CMat::Zero(dim, dim);
  CMat rows;
  CMat block(dim, n_phi);  // masked, weight-scaled rows, transposed for rankUpdate
  for (int it = 0; it < grid.n_theta(); ++it) {
    ylm_theta_rows(band_limit, grid.colatitudes[it], grid.longitudes, rows);
    int cols = 0;
    for (int ip = 0; ip < n_phi; ++ip) {
      const int node = it * n_phi + ip;
      if (!mask.observed[node]) continue;
      block.col(cols++) = std::sqrt(grid.weights(node)) * rows.row(ip).adjoint();
    }
    if (cols > 0) gram.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(cols));
  }
  // Mirror the computed lower triangle so the stored matrix is exactly Hermitian.
  gram = CMat(gram.selfadjointView<Eigen::Lower>());
  return gram;
}

CVec assemble_rhs(const CVec& field, const SphereGrid& grid, const Mask& mask, int band_limit) {
  if (field.size() != grid.n_nodes())
    throw ConfigError("field and grid node counts differ");
  if (mask.n_nodes() != grid.n_nodes()) throw ConfigError("mask and grid node counts differ");
  if (grid.supported_band_limit < band_limit)
    throw ConfigError("grid too coarse for rhs assembly to degree " + std::to_string(band_limit));
  const int n_phi = grid.n_phi();
  CVec rhs = CVec::Zero(coeff_dim(band_limit));
  CMat rows;
  for (int it = 0; it < grid.n_theta(); ++it) {
    ylm_theta_rows(band_limit, grid.colatitudes[it], grid.longitudes, rows);
    CVec wf = CVec::Zero(n_phi);
    bool any = false;
    for (int ip = 0; ip < n_phi; ++ip) {
      const int node = it * n_phi + ip;
      if (!mask.observed[node]) continue;
      wf(ip) = grid.weights(node) * field(node);
      any = true;
    }
    if (any) rhs.noalias() += rows.adjoint() * wf;
  }
  return rhs;
}

double observed_energy(const CVec& field, const SphereGrid& grid) {
  if (field.size() != grid.n_nodes())
    throw ConfigError("field and grid node counts differ");
  double e = 0.0;
  for (int j = 0; j < grid.n_nodes(); ++j) e += grid.weights(j) * std::norm(field(j));
  return e;
}

double masked_energy(const CVec& field, const SphereGrid& grid, const Mask& mask) {
  if (field.size() != grid.n_nodes())
    throw ConfigError("field and grid node counts differ");
  if (mask.n_nodes() != grid.n_nodes()) throw ConfigError("mask and grid node counts differ");
  double e = 0.0;
  for (int j = 0; j < grid.n_nodes(); ++j)
    if (!mask.observed[j]) e += grid.weights(j) * std::norm(field(j));
  return e;
}

DiscreteModel build_model(const SphereGrid& grid, const Mask& mask, const CVec& observed,
                          int band_limit, double rho, const DegreeWeights& weights,
                          std::vector<std::string>* warnings) {
  if (static_cast<int>(weights.values.size()) != band_limit + 1)
    throw ConfigError("degree weights cover " + std::to_string(weights.values.size() - 1) +
                      " degrees, band limit is " + std::to_string(band_limit));
  if (rho < 0.0) throw ConfigError("rho must be nonnegative");

  DiscreteModel model;
  model.band_limit = band_limit;
  model.weights = weights;
  model.rho = rho;
  model.c = observed_energy(observed, grid);
  if (model.c <= rho)
    throw ConfigError("observed energy " + std::to_string(model.c) +
                      " does not exceed rho; the constraint admits alpha = 0 trivially "
                      "or the data are inconsistent");
  const double hidden = masked_energy(observed, grid, mask);
  if (rho <= hidden && warnings)
    warnings->push_back("rho <= hidden-region energy of the observed field (" +
                        std::to_string(rho) + " <= " + std::to_string(hidden) +
                        "); strict feasibility of the data is not guaranteed");
  model.gram = assemble_gram(grid, mask, band_limit);
  model.rhs = assemble_rhs(observed, grid, mask, band_limit);
  return model;
}

void save_model(const std::string& path, const DiscreteModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_bytes(out, kModelMagic, sizeof(kModelMagic));
  const std::uint32_t L = static_cast<std::uint32_t>(model.band_limit);
  write_bytes(out, &L, sizeof(L));
  const double header[4] = {model.p(), model.eta(), model.rho, model.c};
  write_bytes(out, header, sizeof(header));
  const int dim = model.dim();
  // Row-major complex float64, row by row.
  std::vector<double> row(2 * dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      row[2 * j] = model.gram(i, j).real();
      row[2 * j + 1] = model.gram(i, j).imag();
    }
    write_bytes(out, row.data(), row.size() * sizeof(double));
  }
  for (int k = 0; k < dim; ++k) {
    const double re_im[2] = {model.rhs(k).real(), model.rhs(k).imag()};
    write_bytes(out, re_im, sizeof(re_im));
  }
  if (!out) throw IoError("write failure on '" + path + "'");
}

DiscreteModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  char magic[8];
  read_bytes(in, magic, sizeof(magic), "magic");
  if (!std::equal(magic, magic + 8, kModelMagic))
    throw IoError("'" + path + "' is not a model container (bad magic)");
  std::uint32_t L = 0;
  read_bytes(in, &L, sizeof(L), "band limit");
  double header[4];
  read_bytes(in, header, sizeof(header), "header");

  DiscreteModel model;
  model.band_limit = static_cast<int>(L);
  model.weights = DegreeWeights::make(model.band_limit, header[0], header[1]);
  model.rho = header[2];
  model.c = header[3];
  const int dim = model.dim();
  model.gram.resize(dim, dim);
  std::vector<double> row(2 * dim);
  for (int i = 0; i < dim; ++i) {
    read_bytes(in, row.data(), row.size() * sizeof(double), "gram row");
    for (int j = 0; j < dim; ++j) model.gram(i, j) = Complex(row[2 * j], row[2 * j + 1]);
  }
  model.rhs.resize(dim);
  for (int k = 0; k < dim; ++k) {
    double re_im[2];
    read_bytes(in, re_im, sizeof(re_im), "rhs entry");
    model.rhs(k) = Complex(re_im[0], re_im[1]);
  }
  in.peek();
  if (!in.eof()) throw IoError("trailing bytes after model payload in '" + path + "'");
  if ((model.gram - model.gram.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw IoError("model Gram matrix in '" + path + "' is not Hermitian; file corrupt");
  return model;
}

}  // namespace sphinpaint
