#include "dissip/grid_function.hpp"

#include <cmath>
#include <utility>

#include "dissip/errors.hpp"

namespace dissip {

GridFunction::GridFunction(int dim_domain, int dim_range, Eigen::VectorXd origin,
                           double spacing, std::vector<int> extents, int support_margin,
                           std::vector<Complex> values)
    : dim_domain_(dim_domain),
      dim_range_(dim_range),
      origin_(std::move(origin)),
      spacing_(spacing),
      extents_(std::move(extents)),
      support_margin_(support_margin),
      values_(std::move(values)) {
  if (dim_domain_ < 1 || dim_range_ < 1) throw DomainError("grid function dimensions must be >= 1");
  if (static_cast<int>(extents_.size()) != dim_domain_ || origin_.size() != dim_domain_) {
    throw DomainError("grid function extents/origin inconsistent with dim_domain");
  }
  if (spacing_ <= 0.0 || !std::isfinite(spacing_)) throw DomainError("grid spacing must be positive");
  if (support_margin_ < 1) throw DomainError("support margin must be >= 1 cell");
  num_points_ = 1;
  for (int e : extents_) {
    if (e < 3) throw DomainError("grid extents must be >= 3 per axis");
    num_points_ *= e;
  }
  strides_.assign(dim_domain_, 1);
  for (int d = dim_domain_ - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * extents_[d + 1];
  if (static_cast<long>(values_.size()) != num_points_ * dim_range_) {
    throw DomainError("grid function value count does not match extents");
  }
  validate();
}

void GridFunction::validate() const {
  for (const Complex& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DomainError("grid function has non-finite values");
    }
  }
  assert_compact_support();
}

GridFunction GridFunction::zeros(int dim_domain, int dim_range, Eigen::VectorXd origin,
                                 double spacing, std::vector<int> extents, int support_margin) {
  long n = 1;
  for (int e : extents) n *= e;
  return GridFunction(dim_domain, dim_range, std::move(origin), spacing, std::move(extents),
                      support_margin, std::vector<Complex>(n * dim_range, Complex(0.0, 0.0)));
}

GridFunction GridFunction::sample(int dim_domain, int dim_range, Eigen::VectorXd origin,
                                  double spacing, std::vector<int> extents, int support_margin,
                                  const std::function<Complex(const Eigen::VectorXd&, int)>& fn) {
  GridFunction g = zeros(dim_domain, dim_range, std::move(origin), spacing, std::move(extents),
                         support_margin);
  std::vector<int> idx(dim_domain, 0);
  for (long flat = 0; flat < g.num_points_; ++flat) {
    g.unflatten(flat, idx.data());
    if (g.in_margin(idx.data())) continue;
    const Eigen::VectorXd x = g.point_at(flat);
    for (int c = 0; c < dim_range; ++c) g.set_value(c, flat, fn(x, c));
  }
  g.validate();
  return g;
}

bool GridFunction::in_margin(const int* idx) const {
  for (int d = 0; d < dim_domain_; ++d) {
    if (idx[d] < support_margin_ || idx[d] >= extents_[d] - support_margin_) return true;
  }
  return false;
}

double GridFunction::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim_domain_; ++d) v *= spacing_;
  return v;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (const Complex& v : values_) m = std::max(m, std::abs(v));
  return m;
}

long GridFunction::flat_index(const int* idx) const {
  long f = 0;
  for (int d = 0; d < dim_domain_; ++d) f += strides_[d] * idx[d];
  return f;
}

void GridFunction::unflatten(long flat, int* idx) const {
  for (int d = 0; d < dim_domain_; ++d) {
    idx[d] = static_cast<int>(flat / strides_[d]);
    flat -= static_cast<long>(idx[d]) * strides_[d];
  }
}

Eigen::VectorXd GridFunction::point_at(long flat) const {
  Eigen::VectorXd x(dim_domain_);
  std::vector<int> idx(dim_domain_);
  unflatten(flat, idx.data());
  for (int d = 0; d < dim_domain_; ++d) x[d] = origin_[d] + spacing_ * idx[d];
  return x;
}

Complex GridFunction::at(int comp, const int* idx) const {
  long f = 0;
  for (int d = 0; d < dim_domain_; ++d) {
    if (idx[d] < 0 || idx[d] >= extents_[d]) return Complex(0.0, 0.0);
    f += strides_[d] * idx[d];
  }
  return values_[comp * num_points_ + f];
}

Complex GridFunction::diff(int comp, const int* idx, int axis) const {
  const int i = idx[axis];
  Complex hi, lo;
  if (i + 1 < extents_[axis] && i - 1 >= 0) {
    const long f = flat_index(idx);
    hi = values_[comp * num_points_ + f + strides_[axis]];
    lo = values_[comp * num_points_ + f - strides_[axis]];
  } else {
    std::vector<int> j(idx, idx + dim_domain_);
    j[axis] = i + 1;
    hi = at(comp, j.data());
    j[axis] = i - 1;
    lo = at(comp, j.data());
  }
  return (hi - lo) / (2.0 * spacing_);
}

double GridFunction::lp_norm(double q) const {
  double s = 0.0;
  for (long flat = 0; flat < num_points_; ++flat) {
    double a2 = 0.0;
    for (int c = 0; c < dim_range_; ++c) a2 += std::norm(value(c, flat));
    s += std::pow(a2, q / 2.0);
  }
  return std::pow(s * cell_volume(), 1.0 / q);
}

void GridFunction::assert_compact_support() const {
  std::vector<int> idx(dim_domain_, 0);
  for (long flat = 0; flat < num_points_; ++flat) {
    unflatten(flat, idx.data());
    if (!in_margin(idx.data())) continue;
    for (int c = 0; c < dim_range_; ++c) {
      if (value(c, flat) != Complex(0.0, 0.0)) {
        throw DomainError("grid function support touches the zero boundary layer");
      }
    }
  }
}

bool GridFunction::same_grid(const GridFunction& other) const {
  return dim_domain_ == other.dim_domain_ && extents_ == other.extents_ &&
         spacing_ == other.spacing_ && (origin_ - other.origin_).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace dissip
