#ifndef DISSIP_ELASTICITY_HPP
#define DISSIP_ELASTICITY_HPP

#include <vector>

#include "dissip/exponent.hpp"
#include "dissip/tolerances.hpp"
#include "dissip/verdict.hpp"

namespace dissip {

/// Right-hand side of the planar criterion, 2(nu-1)(2nu-1)/(3-4nu)^2.
double planar_elasticity_threshold(double nu);

/// Planar Lame operator: necessary and sufficient test
/// (1/2 - 1/p)^2 <= 2(nu-1)(2nu-1)/(3-4nu)^2.  Margin = RHS - LHS.
Verdict elasticity_planar(double nu, const Exponent& e, const Tolerances& tol = {});

/// Necessary condition for variable Poisson ratio: LHS <= inf over samples of
/// the planar threshold.  `gap` guards inf |2 nu - 1| > 0.
Verdict elasticity_necessary_variable_nu(const std::vector<double>& nu_samples, const Exponent& e,
                                         double gap = 1e-8, const Tolerances& tol = {});

/// Sufficient condition in any dimension:
/// (1-2/p)^2 <= (1-2nu)/(2(1-nu)) for nu < 1/2, or <= 2(1-nu)/(1-2nu) for nu > 1.
Verdict elasticity_ndim_sufficient(double nu, const Exponent& e, const Tolerances& tol = {});

/// Admissible weight exponents for the weighted negativity of the Lame
/// operator on radial vector fields: [-(p-1)(n+p'-2), n+p-2].
struct AlphaRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double alpha) const { return alpha >= lo && alpha <= hi; }
};

AlphaRange elasticity_weighted_alpha_range(int n, const Exponent& e);

}  // namespace dissip

#endif
