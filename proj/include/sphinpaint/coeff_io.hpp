#pragma once

#include <string>

#include "sphinpaint/grid.hpp"
#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Coefficient CSV: header "l,m,re,im", rows in degree-major order (l ascending,
// m = -l..l), 17 significant digits.  Reading validates the header, ordering,
// and completeness, and reports line numbers on failure.
void write_coeffs_csv(const std::string& path, const CoefficientVector& coeffs);
CoefficientVector read_coeffs_csv(const std::string& path);

// Node-field CSV: header "theta,phi,re,im", one row per grid node in node
// order, 17 significant digits.
void write_field_csv(const std::string& path, const CVec& field, const SphereGrid& grid);

struct FieldSamples {
  std::vector<double> thetas;  // per row
  std::vector<double> phis;
  CVec values;
};
FieldSamples read_field_csv(const std::string& path);

}  // namespace sphinpaint
