#ifndef DISSIP_OPERATOR_SPEC_HPP
#define DISSIP_OPERATOR_SPEC_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dissip/tolerances.hpp"

namespace dissip {

enum class OperatorKind {
  Scalar,
  SystemFirstOrder,
  SystemSecondOrder,
  Elasticity,
  Oblique,
  Nonlocal,
};

enum class CoefficientClass { Constant, SmoothSampled };

std::string to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& s);
std::string to_string(CoefficientClass c);
CoefficientClass coefficient_class_from_string(const std::string& s);

/// Nonlocal kernel description: either the fractional density |x-y|^(-n-2s)
/// or a tabulated radial density (linear interpolation between radii, zero
/// beyond the last radius).
struct KernelSpec {
  enum class Kind { Fractional, TabulatedRadial };
  Kind kind = Kind::Fractional;
  int dimension = 1;
  double s = 0.5;                 // fractional exponent, in (0,1)
  std::vector<double> radii;      // tabulated kind only, strictly increasing
  std::vector<double> density;    // same length as radii, >= 0

  /// Radial density value at distance r > 0.
  double density_at(double r) const;
  void validate() const;
};

/// Sampling grid metadata for smooth-sampled coefficient fields.  Field
/// samples are stored flat in C order (last axis fastest).
struct FieldGrid {
  Eigen::VectorXd origin;
  double spacing = 0.0;
  std::vector<int> extents;
  long num_points() const;
};

/// Full description of one operator.  Coefficient "fields" are vectors of
/// samples; constant coefficients carry exactly one sample.
struct OperatorSpec {
  std::string id;
  OperatorKind kind = OperatorKind::Scalar;
  int n = 1;  // spatial dimension
  int m = 1;  // system size (1 for scalar)
  CoefficientClass coefficient_class = CoefficientClass::Constant;

  // Scalar second-order operator div(A grad u) + b.grad u + div(c u) + a u.
  std::vector<Eigen::MatrixXcd> A;            // n x n samples
  std::vector<Eigen::VectorXcd> b, c;         // length-n samples
  std::vector<std::complex<double>> a;        // scalar samples
  std::vector<std::complex<double>> div_b, div_c;

  // First-order system B^h d_h u + d_h(C^h u) + D u; Bh[h] is the sample
  // field of B^h.  dB, dC hold samples of sum_h d_h B^h / sum_h d_h C^h.
  std::vector<std::vector<Eigen::MatrixXcd>> Bh, Ch;
  std::vector<Eigen::MatrixXcd> D, dB, dC;

  // Second-order system d_h(A^h d_h u) + ...; Ah[h] as above.
  std::vector<std::vector<Eigen::MatrixXcd>> Ah;

  // Elasticity Poisson ratio field.
  std::vector<double> nu;

  // Nonlocal kernel.
  std::optional<KernelSpec> kernel;

  // Oblique-derivative boundary coefficients a_j on R^(n-1) and their
  // divergence sum_j d_j a_j.
  std::vector<Eigen::VectorXcd> a_oblique;
  std::vector<std::complex<double>> div_a_oblique;

  std::optional<FieldGrid> grid;

  /// Number of coefficient samples (1 for constant class).
  long sample_count() const;
  bool has_lower_order_terms() const;

  /// Throws DomainError / ConfigError on dimension mismatches or
  /// inadmissible data (e.g. elasticity nu in [1/2, 1]).
  void validate() const;
};

/// Admissibility of the Poisson ratio: nu > 1 or nu < 1/2.
bool elasticity_nu_admissible(double nu);

}  // namespace dissip

#endif
