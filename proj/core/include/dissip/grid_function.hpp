#ifndef DISSIP_GRID_FUNCTION_HPP
#define DISSIP_GRID_FUNCTION_HPP

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace dissip {

using Complex = std::complex<double>;

/// Scalar- or vector-valued function sampled on a uniform grid with a
/// guaranteed zero boundary layer of width support_margin (>= 1 cell).  The
/// zero layer is the structural stand-in for compact support: accessors
/// extend the function by zero outside the box, so centered differences and
/// plain-sum quadrature are exact for the implied compactly supported
/// function on all of R^n.
///
/// Storage is component-major; within a component, C order with the last
/// axis fastest.
class GridFunction {
 public:
  GridFunction(int dim_domain, int dim_range, Eigen::VectorXd origin, double spacing,
               std::vector<int> extents, int support_margin, std::vector<Complex> values);

  static GridFunction zeros(int dim_domain, int dim_range, Eigen::VectorXd origin,
                            double spacing, std::vector<int> extents, int support_margin);

  /// Samples fn(x, component) at grid points; margin cells are forced to zero.
  static GridFunction sample(int dim_domain, int dim_range, Eigen::VectorXd origin,
                             double spacing, std::vector<int> extents, int support_margin,
                             const std::function<Complex(const Eigen::VectorXd&, int)>& fn);

  int dim_domain() const { return dim_domain_; }
  int dim_range() const { return dim_range_; }
  const Eigen::VectorXd& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const std::vector<int>& extents() const { return extents_; }
  int support_margin() const { return support_margin_; }
  long num_points() const { return num_points_; }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& mutable_values() { return values_; }

  double cell_volume() const;
  double max_abs() const;

  long flat_index(const int* idx) const;
  void unflatten(long flat, int* idx) const;
  Eigen::VectorXd point_at(long flat) const;

  Complex value(int comp, long flat) const { return values_[comp * num_points_ + flat]; }
  void set_value(int comp, long flat, Complex v) { values_[comp * num_points_ + flat] = v; }

  /// Zero-extended access by multi-index (any idx allowed).
  Complex at(int comp, const int* idx) const;

  /// Centered difference of component comp along axis at multi-index idx,
  /// with zero extension outside the box.
  Complex diff(int comp, const int* idx, int axis) const;

  /// Discrete L^q norm (q >= 1) with plain-sum quadrature.
  double lp_norm(double q) const;

  /// Throws DomainError if the margin layer is not identically zero.
  void assert_compact_support() const;

  bool same_grid(const GridFunction& other) const;

 private:
  int dim_domain_ = 0, dim_range_ = 1;
  Eigen::VectorXd origin_;
  double spacing_ = 0.0;
  std::vector<int> extents_;
  int support_margin_ = 1;
  long num_points_ = 0;
  std::vector<long> strides_;
  std::vector<Complex> values_;

  bool in_margin(const int* idx) const;
  void validate() const;
};

}  // namespace dissip

#endif
