#ifndef DISSIP_MATRIX_SAMPLE_HPP
#define DISSIP_MATRIX_SAMPLE_HPP

#include <Eigen/Dense>

#include "dissip/tolerances.hpp"

namespace dissip {

/// One complex square matrix sample with its cached real/imaginary split.
///
/// re_sym() is the symmetrized real part (the only part entering quadratic
/// forms over real vectors), im() the raw imaginary part, im_sym()/im_skew()
/// its symmetric and skew halves.  im_symmetric() reports whether the skew
/// half vanishes up to a scale-aware tolerance; several criteria are
/// necessary-and-sufficient only in that case.
class MatrixSample {
 public:
  MatrixSample() = default;

  const Eigen::MatrixXcd& entries() const { return entries_; }
  const Eigen::MatrixXd& re_sym() const { return re_sym_; }
  const Eigen::MatrixXd& im() const { return im_; }
  const Eigen::MatrixXd& im_sym() const { return im_sym_; }
  const Eigen::MatrixXd& im_skew() const { return im_skew_; }
  bool im_symmetric() const { return im_symmetric_; }
  Eigen::Index dim() const { return entries_.rows(); }

 private:
  friend MatrixSample decompose_matrix(const Eigen::MatrixXcd&, const Tolerances&);
  Eigen::MatrixXcd entries_;
  Eigen::MatrixXd re_sym_, im_, im_sym_, im_skew_;
  bool im_symmetric_ = true;
};

/// Splits M into the cached parts.  Throws DomainError on non-square input or
/// non-finite entries.
MatrixSample decompose_matrix(const Eigen::MatrixXcd& m, const Tolerances& tol = {});

}  // namespace dissip

#endif
