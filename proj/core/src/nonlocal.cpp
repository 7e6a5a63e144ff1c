#include "dissip/nonlocal.hpp"

#include <algorithm>
#include <cmath>

#include "dissip/errors.hpp"

namespace dissip {

namespace {

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

constexpr int kNearBand = 2;     // offsets with |d|_inf <= band use averaged weights
constexpr int kSubcells = 12;    // tent-quadrature nodes per axis

/// Tent-weighted average of |r|^2 K(|r|) over the cell-pair offset box
/// [d-h, d+h]^n, divided by |d|^2 (the difference-quotient weight).
double near_weight(const KernelSpec& k, const std::vector<double>& d, double h) {
  const int n = static_cast<int>(d.size());
  double d2 = 0.0;
  for (double x : d) d2 += x * x;
  std::vector<int> node(n, 0);
  const double dt = 2.0 * h / kSubcells;
  double wsum = 0.0;
  Kahan acc;
  while (true) {
    double tent = 1.0;
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double t = -h + (node[a] + 0.5) * dt;
      tent *= 1.0 - std::abs(t) / h;
      const double x = d[a] + t;
      r2 += x * x;
    }
    if (tent > 0.0 && r2 > 0.0) {
      acc.add(tent * r2 * k.density_at(std::sqrt(r2)));
      wsum += tent;
    }
    int a = 0;
    while (a < n && ++node[a] == kSubcells) node[a++] = 0;
    if (a == n) break;
  }
  return (acc.sum / wsum) / d2;
}

/// Offset-indexed table of pair weights for a fixed grid geometry.
class PairWeightTable {
 public:
  PairWeightTable(const KernelSpec& k, const GridFunction& proto) {
    k.validate();
    if (k.dimension != proto.dim_domain()) {
      throw DomainError("kernel dimension does not match the grid");
    }
    dim_ = proto.dim_domain();
    h_ = proto.spacing();
    size_.resize(dim_);
    long total = 1;
    for (int a = 0; a < dim_; ++a) {
      size_[a] = 2 * proto.extents()[a] - 1;
      total *= size_[a];
    }
    w_.assign(total, 0.0);
    std::vector<int> node(dim_, 0);
    std::vector<double> d(dim_, 0.0);
    for (long q = 0; q < total; ++q) {
      long rest = q;
      bool zero = true;
      int band = 0;
      for (int a = dim_ - 1; a >= 0; --a) {
        const int off = static_cast<int>(rest % size_[a]) - (proto.extents()[a] - 1);
        rest /= size_[a];
        node[a] = off;
        d[a] = off * h_;
        if (off != 0) zero = false;
        band = std::max(band, std::abs(off));
      }
      if (zero) continue;  // diagonal pair contributes zero
      if (band <= kNearBand) {
        w_[q] = near_weight(k, d, h_);
      } else {
        double r2 = 0.0;
        for (double x : d) r2 += x * x;
        w_[q] = k.density_at(std::sqrt(r2));
      }
    }
  }

  double weight_at(const int* offset) const {
    long q = 0;
    for (int a = 0; a < dim_; ++a) {
      q = q * size_[a] + (offset[a] + (size_[a] - 1) / 2);
    }
    return w_[q];
  }

 private:
  int dim_ = 0;
  double h_ = 0.0;
  std::vector<int> size_;
  std::vector<double> w_;
};

double pair_sum(const GridFunction& u, const GridFunction& v, const KernelSpec& k) {
  if (!u.same_grid(v)) throw DomainError("bilinear form requires a common grid");
  u.assert_compact_support();
  v.assert_compact_support();
  if (u.dim_range() != 1 || v.dim_range() != 1) {
    throw DomainError("bilinear form expects scalar grid functions");
  }
  const PairWeightTable table(k, u);
  const long npts = u.num_points();
  const int dim = u.dim_domain();
  std::vector<int> idx(static_cast<std::size_t>(npts) * dim);
  for (long q = 0; q < npts; ++q) u.unflatten(q, idx.data() + q * dim);

  double cell2 = 1.0;
  for (int a = 0; a < 2 * dim; ++a) cell2 *= u.spacing();

  Kahan acc;
  std::vector<int> off(dim, 0);
  for (long i = 0; i < npts; ++i) {
    const Complex ui = u.value(0, i);
    const Complex vi = v.value(0, i);
    const int* ii = idx.data() + i * dim;
    for (long j = i + 1; j < npts; ++j) {
      const Complex du = ui - u.value(0, j);
      const Complex dv = vi - v.value(0, j);
      if (du == Complex(0, 0) || dv == Complex(0, 0)) continue;
      const int* jj = idx.data() + j * dim;
      for (int a = 0; a < dim; ++a) off[a] = ii[a] - jj[a];
      acc.add((du * std::conj(dv)).real() * table.weight_at(off.data()));
    }
  }
  return acc.sum * cell2;
}

Complex power_map(Complex z, double q, double eps) {
  const double m2 = std::norm(z) + eps * eps;
  return std::pow(m2, 0.5 * (q - 2.0)) * z;
}

GridFunction power_transform(const GridFunction& u, double q, double eps0) {
  const double eps = eps0 * u.max_abs();
  std::vector<Complex> vals(u.values().size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = power_map(u.values()[i], q, eps);
  return GridFunction(u.dim_domain(), u.dim_range(), u.origin(), u.spacing(), u.extents(),
                      u.support_margin(), std::move(vals));
}

GridFunction modulus_power(const GridFunction& u, double half_exponent) {
  std::vector<Complex> vals(u.values().size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = Complex(std::pow(std::abs(u.values()[i]), half_exponent), 0.0);
  }
  return GridFunction(u.dim_domain(), u.dim_range(), u.origin(), u.spacing(), u.extents(),
                      u.support_margin(), std::move(vals));
}

KernelSpec fractional_kernel(int dim, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional exponent s must lie in (0,1)");
  KernelSpec k;
  k.kind = KernelSpec::Kind::Fractional;
  k.dimension = dim;
  k.s = s;
  return k;
}

}  // namespace

double bilinear_form(const GridFunction& u, const GridFunction& v, const KernelSpec& k) {
  return pair_sum(u, v, k);
}

double nonlocal_form_p(const GridFunction& u, const Exponent& e, const KernelSpec& k,
                       double eps0) {
  if (e.p() >= 2.0) {
    return pair_sum(u, power_transform(u, e.p(), eps0), k);
  }
  return pair_sum(power_transform(u, e.conjugate(), eps0), u, k);
}

double fractional_form_p(const GridFunction& u, const Exponent& e, double s, double eps0) {
  return nonlocal_form_p(u, e, fractional_kernel(u.dim_domain(), s), eps0);
}

double scalar_inequality_gap(double x, double y, const Exponent& e) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("gap arguments must be finite");
  const double p = e.p();
  auto dual = [&](double t) { return t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), p - 1.0), t); };
  const double lhs = (x - y) * (dual(x) - dual(y));
  const double dx = std::pow(std::abs(x), 0.5 * p);
  const double dy = std::pow(std::abs(y), 0.5 * p);
  return lhs - e.cpp() * (dx - dy) * (dx - dy);
}

double besov_seminorm_sq(const GridFunction& v, double s) {
  return 2.0 * pair_sum(v, v, fractional_kernel(v.dim_domain(), s));
}

PositivityReport check_positivity_bound(const GridFunction& u, const Exponent& e,
                                        const KernelSpec& k, const Tolerances& tol,
                                        double reference_s) {
  PositivityReport rep;
  rep.q_used = std::max(e.p(), e.conjugate());
  rep.lhs = nonlocal_form_p(u, e, k, 1e-6);
  const GridFunction g = modulus_power(u, 0.5 * rep.q_used);
  const double gg = pair_sum(g, g, k);
  rep.rhs_half = e.cpp() * gg;
  rep.printed_rhs = 2.0 * e.cpp() * gg;
  rep.margin = rep.lhs - rep.rhs_half;
  rep.printed_margin = rep.lhs - rep.printed_rhs;
  const double scale = std::max({1.0, std::abs(rep.lhs), std::abs(rep.rhs_half)});
  rep.half_bound_holds = rep.margin >= -tol.form_at(scale);

  double s = reference_s;
  if (s < 0.0 && k.kind == KernelSpec::Kind::Fractional) s = k.s;
  if (s > 0.0 && s < 1.0) {
    double c = 0.0;
    if (k.kind == KernelSpec::Kind::Fractional) {
      c = (s == k.s) ? 1.0 : 0.0;
    } else {
      // Largest C with density >= C r^{-n-2s} on the table; zero if the
      // table does not cover the grid diameter.
      double diam = 0.0;
      for (int a = 0; a < u.dim_domain(); ++a) {
        const double len = u.spacing() * (u.extents()[a] - 1);
        diam += len * len;
      }
      diam = std::sqrt(diam);
      if (!k.radii.empty() && k.radii.back() >= diam) {
        c = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k.radii.size(); ++i) {
          if (k.radii[i] > diam) break;
          c = std::min(c, k.density[i] * std::pow(k.radii[i], k.dimension + 2.0 * s));
        }
        if (!std::isfinite(c)) c = 0.0;
      }
    }
    rep.corollary_constant = c;
    rep.besov_bound = (2.0 * c / (e.p() * e.conjugate())) * besov_seminorm_sq(g, s);
  }
  return rep;
}

KernelValidation validate_kernel(const KernelSpec& k) {
  k.validate();
  KernelValidation out;
  // Second moment over the unit box at two resolutions: finite iff stable.
  auto second_moment = [&](int npts) {
    const double h = 1.0 / (npts - 1);
    std::vector<int> extents(k.dimension, npts);
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(k.dimension);
    GridFunction proto = GridFunction::zeros(k.dimension, 1, origin, h, extents, 1);
    PairWeightTable table(k, proto);
    const long total = proto.num_points();
    std::vector<int> idx(static_cast<std::size_t>(total) * k.dimension);
    for (long q = 0; q < total; ++q) proto.unflatten(q, idx.data() + q * k.dimension);
    double cell2 = 1.0;
    for (int a = 0; a < 2 * k.dimension; ++a) cell2 *= h;
    Kahan acc;
    std::vector<int> off(k.dimension, 0);
    for (long i = 0; i < total; ++i) {
      for (long j = i + 1; j < total; ++j) {
        double d2 = 0.0;
        for (int a = 0; a < k.dimension; ++a) {
          off[a] = idx[i * k.dimension + a] - idx[j * k.dimension + a];
          const double x = off[a] * h;
          d2 += x * x;
        }
        acc.add(2.0 * d2 * table.weight_at(off.data()));
      }
    }
    return acc.sum * cell2;
  };
  out.second_moment_coarse = second_moment(9);
  out.second_moment_fine = second_moment(17);
  out.second_moment_finite =
      out.second_moment_fine <= 4.0 * std::max(out.second_moment_coarse, 1e-300);

  // Far field: int_{|x|<R} int_{|y-x|>2R} K, with R = 1/2, via the radial
  // tail integral with the unit-sphere surface factor.
  const double R = 0.5;
  const double surface = 2.0 * std::pow(M_PI, 0.5 * k.dimension) / std::tgamma(0.5 * k.dimension);
  double ball = std::pow(M_PI, 0.5 * k.dimension) / std::tgamma(0.5 * k.dimension + 1.0) *
                std::pow(R, k.dimension);
  if (k.kind == KernelSpec::Kind::Fractional) {
    out.far_field = ball * surface * std::pow(2.0 * R, -2.0 * k.s) / (2.0 * k.s);
    out.far_field_finite = true;
  } else {
    Kahan acc;
    const double rmax = k.radii.back();
    const int steps = 4096;
    const double dr = std::max(0.0, rmax - 2.0 * R) / steps;
    for (int i = 0; i < steps && dr > 0.0; ++i) {
      const double r = 2.0 * R + (i + 0.5) * dr;
      acc.add(k.density_at(r) * std::pow(r, k.dimension - 1.0) * dr);
    }
    out.far_field = ball * surface * acc.sum;
    out.far_field_finite = true;  // tables vanish beyond the last radius
  }
  return out;
}

}  // namespace dissip
