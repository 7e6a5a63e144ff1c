#ifndef DISSIP_LAME_PROBE_HPP
#define DISSIP_LAME_PROBE_HPP

#include <cstdint>

#include "dissip/exponent.hpp"
#include "dissip/grid_function.hpp"
#include "dissip/probe.hpp"

namespace dissip {

/// Quadrature of the transformed elasticity integrand
///   C_p |grad|v||^2 - sum_j |grad v_j|^2
///   + gamma C_p |v|^-2 |v_h d_h |v||^2 - gamma |div v|^2
/// with gamma = (1 - 2 nu)^-1; dissipativity of the Lame operator is
/// equivalent to this being <= 0 for every (resolved) v.
double lame_form(const GridFunction& v, double nu, const Exponent& e);

struct LameSearchOptions {
  int grid_points = 25;
  double box_halfwidth = 1.0;
  int refine_sweeps = 3;
};

/// Searches for a field with lame_form > 0 over two band-limited trial
/// families (windowed plane waves with transverse modulation, and log-spiral
/// perturbations of a rotational base field), maximizing over the family
/// parameters.  Fields are normalized in discrete L^2.  Free-form grid
/// ascent is deliberately not used: the sharp-constant inequality does not
/// survive discretization for fields with content near the grid Nyquist
/// frequency, so only resolved trial fields give trustworthy positives.
ProbeResult lame_counterexample_search(double nu, const Exponent& e,
                                       const LameSearchOptions& opts = {});

/// Weighted radial probe for u = f(rho) e_rho:
///   int (Delta u + (1-2nu)^-1 grad div u) |u|^{p-2} u |x|^-alpha dx
/// reduced to a radial quadrature with measure rho^{n-1-alpha}.  The sign is
/// <= 0 for every profile iff alpha lies in elasticity_weighted_alpha_range.
double weighted_lame_probe(const GridFunction& profile, int n, double nu, double alpha,
                           const Exponent& e);

/// Sum of absolute integrand contributions, for scale-aware tolerances.
double weighted_lame_scale(const GridFunction& profile, int n, double nu, double alpha,
                           const Exponent& e);

struct WeightedSearchOptions {
  int grid_points = 1201;
  double rho_min = 0.02;
  double rho_max = 1.0;
  int refine_sweeps = 3;
};

/// Maximizes weighted_lame_probe over truncated power-law profiles
/// rho^kappa * window(rho); the scale-invariant exponent
/// kappa = (alpha - n + 2)/p yields log-divergent positive values whenever
/// alpha is outside the admissible range.
ProbeResult weighted_profile_search(int n, double nu, double alpha, const Exponent& e,
                                    const WeightedSearchOptions& opts = {});

}  // namespace dissip

#endif
