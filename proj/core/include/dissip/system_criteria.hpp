#ifndef DISSIP_SYSTEM_CRITERIA_HPP
#define DISSIP_SYSTEM_CRITERIA_HPP

#include <cstdint>

#include "dissip/exponent.hpp"
#include "dissip/operator_spec.hpp"
#include "dissip/tolerances.hpp"
#include "dissip/verdict.hpp"

namespace dissip {

/// Minimization device for the second-order system condition: quasi-random
/// coarse sampling of the product of unit spheres followed by seeded local
/// refinement.
struct SphereSearchConfig {
  int coarse_samples = 256;   // >= 64
  int refine_iters = 120;
  int restarts = 6;
  std::uint64_t seed = 20240901ULL;
};

/// First-order system B^h d_h u + D u.  Necessary and sufficient: structure
/// (B^h = b_h I with b_h real for p != 2, B^h Hermitian for p = 2) plus the
/// spectral condition Herm(p^-1 sum_h d_h B^h - D) >= 0 at every sample.
Verdict check_first_order(const OperatorSpec& spec, const Exponent& e,
                          const Tolerances& tol = {});

/// General first-order system with both B^h and C^h; same two-step test on
/// B^h + C^h and p^-1 dB - p'^-1 dC - D.
Verdict check_first_order_general(const OperatorSpec& spec, const Exponent& e,
                                  const Tolerances& tol = {});

/// The two-vector form minimized over |lambda| = |omega| = 1 for one matrix.
double second_order_form(const Eigen::MatrixXcd& Ah, const Exponent& e,
                         const Eigen::VectorXcd& lambda, const Eigen::VectorXcd& omega);

/// Principal-part condition for d_h(A^h d_h u): numerical minimization of
/// second_order_form per sample and direction.  min >= -tau_form holds
/// (necessary and sufficient without lower-order terms); min < -10 tau_form
/// is a disproof with a (lambda, omega, sample, h) certificate; the band in
/// between is Indeterminate.
Verdict check_second_order_system(const OperatorSpec& spec, const Exponent& e,
                                  const SphereSearchConfig& cfg = {},
                                  const Tolerances& tol = {});

/// Sufficient-only combination: principal-part condition plus the first-order
/// structure/spectral conditions.  Never disproves.
Verdict check_combined_second_order(const OperatorSpec& spec, const Exponent& e,
                                    const SphereSearchConfig& cfg = {},
                                    const Tolerances& tol = {});

}  // namespace dissip

#endif
