#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sphinpaint/grid.hpp"
#include "sphinpaint/harmonics.hpp"
#include "sphinpaint/model.hpp"
#include "sphinpaint/types.hpp"
#include "test_support.hpp"

using namespace sphinpaint;

namespace {

constexpr double kPi = 3.14159265358979323846;

MaskSpec hidden_cap_spec(double colat, double lon, double radius) {
  MaskShape s;
  s.kind = ShapeKind::polar_cap;
  s.center_colatitude = colat;
  s.center_longitude = lon;
  s.angular_radius = radius;
  MaskSpec spec;
  spec.shapes = {s};
  spec.complement = true;
  return spec;
}

MaskSpec northern_hemisphere_spec() {
  MaskShape s;
  s.kind = ShapeKind::latitude_band;
  s.theta_min = 0.0;
  s.theta_max = kPi / 2;
  MaskSpec spec;
  spec.shapes = {s};
  spec.complement = false;  // the band itself is observed
  return spec;
}

MaskSpec full_sphere_spec() { return MaskSpec{{}, true}; }

// Constraint value g(alpha) straight from the model data.
double algebraic_g(const CVec& alpha, const DiscreteModel& model) {
  const Complex quad = alpha.dot(model.gram * alpha);
  return quad.real() - 2.0 * alpha.dot(model.rhs).real() + model.c - model.rho;
}

}  // namespace

TEST_CASE("full-sphere Gram matrix is the identity") {
  const int L = 6;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(full_sphere_spec(), grid);
  const CMat gram = assemble_gram(grid, mask, L);
  REQUIRE(gram.rows() == coeff_dim(L));
  const CMat err = gram - CMat::Identity(gram.rows(), gram.cols());
  CHECK(err.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Gram matrices are exactly Hermitian with spectrum in (0, 1]") {
  const int L = 10;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(0.8, 2.0, 0.5), grid);
  const CMat gram = assemble_gram(grid, mask, L);
  CHECK((gram - gram.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::SelfAdjointEigenSolver<CMat> eig(gram);
  REQUIRE(eig.info() == Eigen::Success);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK(eig.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("hemisphere Gram diagonal entry for the constant harmonic is one half") {
  const int L = 7;  // even ring count: no node sits exactly on the equator
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(northern_hemisphere_spec(), grid);
  const CMat gram = assemble_gram(grid, mask, L);
  CHECK(gram(0, 0).real() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::fabs(gram(0, 0).imag()) < 1e-14);
}

TEST_CASE("Gram assembly validates grid resolution and mask size") {
  const SphereGrid coarse = build_grid(5);
  const Mask mask = build_mask(full_sphere_spec(), coarse);
  CHECK_THROWS_AS(assemble_gram(coarse, mask, 6), ConfigError);
  const SphereGrid other = build_grid(6);
  CHECK_THROWS_AS(assemble_gram(other, mask, 6), ConfigError);
  CHECK_THROWS_AS(assemble_rhs(CVec::Zero(other.n_nodes()), other, mask, 6), ConfigError);
}

TEST_CASE("rhs of the zero field vanishes") {
  const int L = 5;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(0.0, 0.0, 0.6), grid);
  const CVec rhs = assemble_rhs(CVec::Zero(grid.n_nodes()), grid, mask, L);
  CHECK(rhs.norm() == 0.0);
}

TEST_CASE("full-sphere rhs of a band-limited field recovers its coefficients") {
  const int L = 8;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(full_sphere_spec(), grid);
  const CoefficientVector b = testing::random_coeffs(L, 401);
  const CVec rhs = assemble_rhs(synthesize(b, grid), grid, mask, L);
  CHECK((rhs - b.flat()).norm() <= 1e-10 * b.flat().norm());
}

TEST_CASE("masked rhs of a band-limited field equals Gram times its coefficients") {
  const int L = 8;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(1.1, 0.7, 0.45), grid);
  const CoefficientVector b = testing::random_coeffs(L, 402);
  const CVec rhs = assemble_rhs(synthesize(b, grid), grid, mask, L);
  const CMat gram = assemble_gram(grid, mask, L);
  CHECK((rhs - gram * b.flat()).norm() <= 1e-9 * b.flat().norm());
}

TEST_CASE("observed energy matches analytic and Parseval values") {
  const int L = 9;
  const SphereGrid grid = build_grid(L);
  CHECK(observed_energy(CVec::Zero(grid.n_nodes()), grid) == 0.0);

  const CVec constant = CVec::Constant(grid.n_nodes(), Complex(1.0 / std::sqrt(4.0 * kPi), 0.0));
  CHECK(observed_energy(constant, grid) == doctest::Approx(1.0).epsilon(1e-12));

  const CoefficientVector b = testing::random_coeffs(L, 403);
  const double parseval = b.flat().squaredNorm();
  CHECK(observed_energy(synthesize(b, grid), grid) == doctest::Approx(parseval).epsilon(1e-8));

  CHECK_THROWS_AS(observed_energy(CVec::Zero(3), grid), ConfigError);
}

TEST_CASE("masked energy integrates only over the hidden region") {
  const int L = 7;
  const SphereGrid grid = build_grid(L);
  const CVec constant = CVec::Constant(grid.n_nodes(), Complex(1.0 / std::sqrt(4.0 * kPi), 0.0));

  const Mask full = build_mask(full_sphere_spec(), grid);
  CHECK(masked_energy(constant, grid, full) == 0.0);
  CHECK(masked_energy(CVec::Zero(grid.n_nodes()), grid, full) == 0.0);

  // Northern hemisphere observed: the hidden half carries half the energy.
  const Mask hemi = build_mask(northern_hemisphere_spec(), grid);
  CHECK(masked_energy(constant, grid, hemi) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("algebraic constraint equals the direct surface integral") {
  const int L = 6;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(0.9, 4.0, 0.5), grid);
  const DegreeWeights weights = DegreeWeights::make(L, 0.5, 1.0001);

  for (unsigned seed = 0; seed < 5; ++seed) {
    const CoefficientVector b = testing::random_coeffs(L, 500 + seed);
    const CoefficientVector alpha = testing::random_coeffs(L, 600 + seed);
    const CVec observed = synthesize(b, grid);
    const double rho = 0.25 * observed_energy(observed, grid);
    const DiscreteModel model = build_model(grid, mask, observed, L, rho, weights);

    const CVec field_alpha = synthesize(alpha, grid);
    double direct = -rho;
    for (int j = 0; j < grid.n_nodes(); ++j) {
      const double w = grid.weights(j);
      if (mask.is_observed(j))
        direct += w * std::norm(field_alpha(j) - observed(j));
      else
        direct += w * std::norm(observed(j));
    }
    const double algebraic = algebraic_g(alpha.flat(), model);
    CHECK(std::fabs(algebraic - direct) <= 1e-8 * std::max(1.0, std::fabs(direct)));
  }
}

TEST_CASE("build_model rejects rho at or above the observed energy") {
  const int L = 4;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(0.0, 0.0, 0.5), grid);
  const CoefficientVector b = testing::random_coeffs(L, 404);
  const CVec observed = synthesize(b, grid);
  const double c = observed_energy(observed, grid);
  const DegreeWeights weights = DegreeWeights::make(L, 0.5, 1.0001);

  CHECK_THROWS_AS(build_model(grid, mask, observed, L, c, weights), ConfigError);
  CHECK_THROWS_AS(build_model(grid, mask, observed, L, 2.0 * c, weights), ConfigError);
  CHECK_THROWS_AS(build_model(grid, mask, observed, L, -1.0, weights), ConfigError);
  CHECK_THROWS_AS(build_model(grid, mask, observed, L, 0.5 * c, DegreeWeights::make(L - 1, 0.5, 1.0001)),
                  ConfigError);
}

TEST_CASE("build_model warns when rho does not exceed the hidden energy") {
  const int L = 5;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(0.6, 1.0, 0.5), grid);
  const CoefficientVector b = testing::random_coeffs(L, 405);
  const CVec observed = synthesize(b, grid);
  const double hidden = masked_energy(observed, grid, mask);
  const double c = observed_energy(observed, grid);
  REQUIRE(hidden > 0.0);
  REQUIRE(hidden < c);
  const DegreeWeights weights = DegreeWeights::make(L, 0.5, 1.0001);

  std::vector<std::string> warnings;
  build_model(grid, mask, observed, L, 0.5 * hidden, weights, &warnings);
  CHECK(warnings.size() == 1);

  warnings.clear();
  build_model(grid, mask, observed, L, 0.5 * (hidden + c), weights, &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("truncated observed coefficients are strictly feasible") {
  // With T° itself band-limited, T_b matches T° on Gamma exactly, so
  // g(b) reduces to the hidden-region energy minus rho.
  const int L = 8;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(1.3, 5.2, 0.4), grid);
  const CoefficientVector b = testing::random_coeffs(L, 406);
  const CVec observed = synthesize(b, grid);
  const double hidden = masked_energy(observed, grid, mask);
  const double c = observed_energy(observed, grid);
  const double rho = 0.5 * (hidden + c);
  const DiscreteModel model =
      build_model(grid, mask, observed, L, rho, DegreeWeights::make(L, 0.5, 1.0001));

  const double g_b = algebraic_g(b.flat(), model);
  CHECK(g_b < 0.0);
  CHECK(std::fabs(g_b - (hidden - rho)) <= 1e-8 * std::fabs(hidden - rho));
}

TEST_CASE("full-sphere model carries the identity Gram and exact coefficients") {
  const int L = 5;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(full_sphere_spec(), grid);
  const CoefficientVector b = testing::random_coeffs(L, 407);
  const CVec observed = synthesize(b, grid);
  const DiscreteModel model = build_model(grid, mask, observed, L,
                                          0.5 * observed_energy(observed, grid),
                                          DegreeWeights::make(L, 0.5, 1.0001));
  CHECK((model.gram - CMat::Identity(model.dim(), model.dim())).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((model.rhs - b.flat()).norm() <= 1e-10 * b.flat().norm());
  CHECK(model.p() == 0.5);
  CHECK(model.eta() == 1.0001);
}

TEST_CASE("model container round trips bitwise and rejects corruption") {
  const int L = 4;
  const SphereGrid grid = build_grid(L);
  const Mask mask = build_mask(hidden_cap_spec(0.4, 0.9, 0.5), grid);
  const CoefficientVector b = testing::random_coeffs(L, 408);
  const CVec observed = synthesize(b, grid);
  const DiscreteModel model =
      build_model(grid, mask, observed, L, 0.6 * observed_energy(observed, grid),
                  DegreeWeights::make(L, 0.4, 1.0001));

  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "sphinpaint_test_model.bin";
  save_model(path.string(), model);
  const DiscreteModel loaded = load_model(path.string());
  CHECK(loaded.band_limit == model.band_limit);
  CHECK(loaded.p() == model.p());
  CHECK(loaded.eta() == model.eta());
  CHECK(loaded.rho == model.rho);
  CHECK(loaded.c == model.c);
  CHECK((loaded.gram - model.gram).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.rhs - model.rhs).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("truncated file") {
    fs::resize_file(path, fs::file_size(path) / 2);
    CHECK_THROWS_AS(load_model(path.string()), IoError);
  }
  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.put('X');
    f.close();
    CHECK_THROWS_AS(load_model(path.string()), IoError);
  }
  SUBCASE("trailing bytes") {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    f.put('\0');
    f.close();
    CHECK_THROWS_AS(load_model(path.string()), IoError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model((fs::temp_directory_path() / "no_such_model.bin").string()),
                    IoError);
  }
  fs::remove(path);
}
