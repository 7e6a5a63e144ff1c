#ifndef DISSIP_TOLERANCES_HPP
#define DISSIP_TOLERANCES_HPP

#include <algorithm>

namespace dissip {

/// Central floating-point slack for otherwise exact criteria.
///
/// `eig` is the absolute slack on minimum eigenvalues of criterion matrices,
/// `form` is the relative slack applied to discretized functional values
/// (effective tolerance = form * scale of the quantity being tested).
struct Tolerances {
  double eig = 1e-9;
  double form = 1e-7;
  /// Relative threshold used to classify a matrix part as symmetric/zero.
  double sym_detect = 1e-12;

  double form_at(double scale) const { return form * std::max(1.0, scale); }
};

}  // namespace dissip

#endif
