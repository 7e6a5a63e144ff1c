#ifndef DISSIP_SCALAR_CRITERIA_HPP
#define DISSIP_SCALAR_CRITERIA_HPP

#include <string>

#include "dissip/exponent.hpp"
#include "dissip/matrix_sample.hpp"
#include "dissip/operator_spec.hpp"
#include "dissip/tolerances.hpp"
#include "dissip/verdict.hpp"

namespace dissip {

/// Free parameters of the affine-quadratic sufficient condition.
struct PolynomialConditionParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Scalar operator coefficients frozen at one sample point.
struct ScalarPoint {
  MatrixSample A;
  Eigen::VectorXcd b, c;                  // empty means identically zero
  std::complex<double> a{0.0, 0.0};
  std::complex<double> div_b{0.0, 0.0};
  std::complex<double> div_c{0.0, 0.0};
  bool has_divergences = false;
};

/// Extracts the sample-i view of a scalar spec (constant fields broadcast).
ScalarPoint scalar_point_at(const OperatorSpec& spec, long i, const Tolerances& tol = {});

/// Sector inequality |p-2| |<Im A xi, xi>| <= 2 sqrt(p-1) <Re A xi, xi>,
/// decided through the eigenvalues of re_sym -+ ratio * im_sym.
///
/// With symmetric Im A and no lower-order terms in the enclosing operator the
/// test is necessary and sufficient (ProvenDissipative / ProvenNot-);
/// otherwise it is necessary only (Indeterminate / NecessaryFails).
/// The margin is the minimum eigenvalue of the normalized pencil, which is
/// invariant under p <-> p' and scales linearly with A.
Verdict check_main_condition(const MatrixSample& A, const Exponent& e,
                             bool lower_order_terms = false, const Tolerances& tol = {});

/// Equivalent two-vector quadratic form: minimum eigenvalue of
///   [[ 4/(pp') Re,  -(1-2/p) ImSym ], [ -(1-2/p) ImSym,  Re ]]
/// over (xi, eta).  Claim strengths as in check_main_condition.
Verdict check_quadratic_form_condition(const MatrixSample& A, const Exponent& e,
                                       bool lower_order_terms = false,
                                       const Tolerances& tol = {});

/// Affine-quadratic sufficient condition with lower-order terms; sufficient
/// only, so the outcome is SufficientHolds or Indeterminate (with a
/// negative-value witness (xi, eta) when the form is not bounded below by 0).
Verdict check_polynomial_condition(const ScalarPoint& pt, const Exponent& e,
                                   const PolynomialConditionParams& params = {},
                                   const Tolerances& tol = {});

/// Coarse grid search over (alpha, beta) in [-range, range]^2; returns the
/// best verdict found (first SufficientHolds wins).
Verdict check_polynomial_best_effort(const ScalarPoint& pt, const Exponent& e,
                                     const Tolerances& tol = {}, int grid_per_axis = 9,
                                     double range = 2.0);

/// Necessary-and-sufficient test for constant coefficients
/// A (symmetrized), b, a: existence of a real V with 2 Re(A) V = -Im b,
/// Re a + <Re(A) V, V> <= 0, plus the sector inequality.
Verdict check_constant_coefficients(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                                    std::complex<double> a, const Exponent& e,
                                    const Tolerances& tol = {});

/// Necessary condition <Re A xi, xi> >= 0.
Verdict check_necessary_repart(const MatrixSample& A, const Tolerances& tol = {});

/// Applies a pointwise criterion ("main", "quadform", "repart", "polynomial")
/// at every sample of a scalar spec; the aggregate carries the worst margin
/// and the worst sample's witness.
Verdict check_field(const OperatorSpec& spec, const Exponent& e, const std::string& criterion,
                    const PolynomialConditionParams& params = {}, const Tolerances& tol = {});

}  // namespace dissip

#endif
