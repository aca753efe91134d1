#pragma once

#include <string>

#include "sphinpaint/grid.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Finite-dimensional data of the inpainting problem at truncation level L:
// minimize sum_l beta_l ||alpha_{l.}||^p subject to
//   g(alpha) = alpha^H gram alpha - 2 Re(alpha^H rhs) + c - rho <= 0,
// where gram[k,k'] = int_Gamma conj(Y_k) Y_k' dsigma (so alpha^H gram alpha is
// the observed-region energy of the synthesized field), rhs_k is the masked
// projection of the observed field onto Y_k, and c its full-sphere energy.
struct DiscreteModel {
  int band_limit = 0;
  DegreeWeights weights;  // carries p and eta
  CMat gram;              // Hermitian, positive definite, eigenvalues in (0, 1]
  CVec rhs;
  double c = 0.0;
  double rho = 0.0;

  int dim() const { return coeff_dim(band_limit); }
  double p() const { return weights.p; }
  double eta() const { return weights.eta; }
};

// gram[k,k'] = sum_{j in Gamma} w_j conj(Y_k(x_j)) Y_k'(x_j), assembled as
// B^H B over masked rows of the synthesis matrix (deterministic block order).
CMat assemble_gram(const SphereGrid& grid, const Mask& mask, int band_limit);

// rhs_k = sum_{j in Gamma} w_j field_j conj(Y_k(x_j)).
CVec assemble_rhs(const CVec& field, const SphereGrid& grid, const Mask& mask, int band_limit);

// Full-sphere quadrature energy sum_j w_j |field_j|^2.
double observed_energy(const CVec& field, const SphereGrid& grid);

// Energy over the hidden region Gamma^c only.
double masked_energy(const CVec& field, const SphereGrid& grid, const Mask& mask);

// Assembles the whole model.  Fails if observed_energy(field) <= rho (the
// constraint would be vacuous or infeasible at truth scale); appends a warning
// to `warnings` (when given) if rho <= masked_energy, i.e. strict feasibility
// of the data is not guaranteed.
DiscreteModel build_model(const SphereGrid& grid, const Mask& mask, const CVec& observed,
                          int band_limit, double rho, const DegreeWeights& weights,
                          std::vector<std::string>* warnings = nullptr);

// Binary container (little-endian): magic, band limit, p, eta, rho, c, the
// Gram matrix row-major as complex float64, then the rhs vector.
void save_model(const std::string& path, const DiscreteModel& model);
DiscreteModel load_model(const std::string& path);

}  // namespace sphinpaint
