#include "dissip/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dissip/errors.hpp"
#include "dissip/operator_spec.hpp"

namespace dissip {

double planar_elasticity_threshold(double nu) {
  const double d = 3.0 - 4.0 * nu;
  return 2.0 * (nu - 1.0) * (2.0 * nu - 1.0) / (d * d);
}

namespace {

void require_admissible(double nu) {
  if (!elasticity_nu_admissible(nu)) {
    throw DomainError("Poisson ratio must satisfy nu > 1 or nu < 1/2");
  }
}

double planar_lhs(const Exponent& e) {
  const double t = 0.5 - 1.0 / e.p();
  return t * t;
}

}  // namespace

Verdict elasticity_planar(double nu, const Exponent& e, const Tolerances& tol) {
  require_admissible(nu);
  const double lhs = planar_lhs(e);
  const double rhs = planar_elasticity_threshold(nu);
  Verdict v;
  v.criterion_id = "elasticity-planar";
  v.margin = rhs - lhs;
  v.details["lhs"] = lhs;
  v.details["rhs"] = rhs;
  v.status = (v.margin >= -tol.form_at(1.0)) ? Status::ProvenDissipative
                                             : Status::ProvenNotDissipative;
  return v;
}

Verdict elasticity_necessary_variable_nu(const std::vector<double>& nu_samples, const Exponent& e,
                                         double gap, const Tolerances& tol) {
  if (nu_samples.empty()) throw ConfigError("variable-nu check requires nu samples");
  double inf_rhs = std::numeric_limits<double>::infinity();
  int worst = 0;
  for (std::size_t i = 0; i < nu_samples.size(); ++i) {
    const double nu = nu_samples[i];
    require_admissible(nu);
    if (std::abs(2.0 * nu - 1.0) < gap) {
      throw DomainError("variable-nu check requires inf |2 nu - 1| above the configured gap");
    }
    const double rhs = planar_elasticity_threshold(nu);
    if (rhs < inf_rhs) {
      inf_rhs = rhs;
      worst = static_cast<int>(i);
    }
  }
  Verdict v;
  v.criterion_id = "elasticity-necessary-variable-nu";
  v.margin = inf_rhs - planar_lhs(e);
  v.details["inf_rhs"] = inf_rhs;
  if (v.margin < -tol.form_at(1.0)) {
    v.status = Status::NecessaryFails;
    Certificate c;
    c.kind = "sample";
    c.sample_index = worst;
    c.value = inf_rhs;
    v.certificate = c;
  } else {
    v.status = Status::Indeterminate;
    v.details["necessary_holds"] = 1.0;
  }
  return v;
}

Verdict elasticity_ndim_sufficient(double nu, const Exponent& e, const Tolerances& tol) {
  require_admissible(nu);
  const double threshold =
      nu < 0.5 ? (1.0 - 2.0 * nu) / (2.0 * (1.0 - nu)) : 2.0 * (1.0 - nu) / (1.0 - 2.0 * nu);
  Verdict v;
  v.criterion_id = "elasticity-ndim-sufficient";
  v.margin = threshold - e.cp();
  v.details["threshold"] = threshold;
  v.status = (v.margin >= -tol.form_at(1.0)) ? Status::SufficientHolds : Status::Indeterminate;
  return v;
}

AlphaRange elasticity_weighted_alpha_range(int n, const Exponent& e) {
  if (n < 2) throw DomainError("weighted alpha range requires dimension n >= 2");
  AlphaRange r;
  r.lo = -(e.p() - 1.0) * (n + e.conjugate() - 2.0);
  r.hi = n + e.p() - 2.0;
  return r;
}

}  // namespace dissip
