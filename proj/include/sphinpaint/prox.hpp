#pragma once

#include "sphinpaint/types.hpp"

namespace sphinpaint {

// Scalar reduction of the group subproblem
//   min_{v} beta ||v||^p + M ||v - z||^2,  r = ||z||:
//   min_{t >= 0} h(t) = beta t^p + M (t - r)^2.
struct ProxInstance {
  double r = 0.0;
  double beta = 1.0;
  double p = 0.5;
  double M = 1.0;
};

// Center of the quadratic model: z_l = alpha_l - grad_l / M.
CVec shifted_center(const CVec& alpha_group, const CVec& grad_group, double M);

// Global minimizer of h over t >= 0.  The stationarity function
// phi(t) = 2 M (t - r) + p beta t^{p-1} is strictly convex on (0, inf) with
// minimum at t_min = (p (1-p) beta / (2M))^{1/(2-p)}; if phi(t_min) > 0 there
// is no interior root and the answer is 0, otherwise the larger root of phi in
// [t_min, r] is found by safeguarded Newton and compared against h(0) = M r^2
// (ties resolved to 0).  Root tolerance: |phi(t)| <= 1e-12 (1 + M r).
double scalar_prox(const ProxInstance& inst);

// Vector prox: scales z to the scalar solution, preserving direction exactly;
// returns the zero vector when the scalar solution is 0.
CVec group_prox(const CVec& z, double beta, double p, double M);

}  // namespace sphinpaint
