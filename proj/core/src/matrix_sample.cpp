#include "dissip/matrix_sample.hpp"

#include <cmath>

#include "dissip/errors.hpp"

namespace dissip {

MatrixSample decompose_matrix(const Eigen::MatrixXcd& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) {
    throw DomainError("matrix sample must be square");
  }
  if (!m.allFinite()) {
    throw DomainError("matrix sample has non-finite entries");
  }
  MatrixSample s;
  s.entries_ = m;
  const Eigen::MatrixXd re = m.real();
  s.re_sym_ = 0.5 * (re + re.transpose());
  s.im_ = m.imag();
  s.im_sym_ = 0.5 * (s.im_ + s.im_.transpose());
  s.im_skew_ = 0.5 * (s.im_ - s.im_.transpose());
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  s.im_symmetric_ = s.im_skew_.cwiseAbs().maxCoeff() <= tol.sym_detect * scale;
  return s;
}

}  // namespace dissip
