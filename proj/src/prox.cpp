#include "sphinpaint/prox.hpp"

#include <cmath>

namespace sphinpaint {

CVec shifted_center(const CVec& alpha_group, const CVec& grad_group, double M) {
  if (!(M > 0.0)) throw ConfigError("prox curvature M must be positive");
  if (alpha_group.size() != grad_group.size())
    throw ConfigError("group and gradient sizes differ in shifted_center");
  return alpha_group - grad_group / M;
}

double scalar_prox(const ProxInstance& inst) {
  const double r = inst.r, beta = inst.beta, p = inst.p, M = inst.M;
  if (!(r >= 0.0)) throw ConfigError("prox radius r must be nonnegative");
  if (!(beta >= 0.0)) throw ConfigError("prox weight beta must be nonnegative");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("prox exponent p must lie in (0, 1)");
  if (!(M > 0.0)) throw ConfigError("prox curvature M must be positive");
  if (r == 0.0) return 0.0;
  if (beta == 0.0) return r;

  const auto phi = [&](double t) { return 2.0 * M * (t - r) + p * beta * std::pow(t, p - 1.0); };

  // phi is strictly convex on (0, inf) with minimum at t_min; no root at all
  // (hence prox = 0) when the minimum value is positive or lies beyond r.
  const double t_min = std::pow(p * (1.0 - p) * beta / (2.0 * M), 1.0 / (2.0 - p));
  if (t_min >= r || phi(t_min) > 0.0) return 0.0;

  // Larger root of phi bracketed by [t_min, r]: phi(t_min) <= 0 < phi(r).
  const double tol = 1e-12 * (1.0 + M * r);
  double lo = t_min, hi = r, t = r;
  for (int it = 0; it < 200; ++it) {
    const double ph = phi(t);
    if (std::abs(ph) <= tol) break;
    if (ph > 0.0)
      hi = t;
    else
      lo = t;
    const double dph = 2.0 * M + p * (p - 1.0) * beta * std::pow(t, p - 2.0);
    double next = t - ph / dph;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
    t = next;
  }

  const double h_t = beta * std::pow(t, p) + M * (t - r) * (t - r);
  const double h_0 = M * r * r;
  return h_t < h_0 ? t : 0.0;  // ties prune the group
}

CVec group_prox(const CVec& z, double beta, double p, double M) {
  const double r = z.norm();
  ProxInstance inst{r, beta, p, M};
  const double t = scalar_prox(inst);
  if (t == 0.0) return CVec::Zero(z.size());
  return (t / r) * z;
}

}  // namespace sphinpaint
