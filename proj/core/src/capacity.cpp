#include "dissip/capacity.hpp"

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

struct LaplaceGrid {
  int dim;
  std::vector<int> extents;
  std::vector<long> strides;
  long npts;
  double h;
  int margin;

  explicit LaplaceGrid(const GridFunction& g)
      : dim(g.dim_domain()), extents(g.extents()), npts(g.num_points()), h(g.spacing()),
        margin(g.support_margin()) {
    strides.assign(dim, 1);
    for (int d = dim - 2; d >= 0; --d) strides[d] = strides[d + 1] * extents[d + 1];
  }

  bool interior(const int* idx) const {
    for (int d = 0; d < dim; ++d) {
      if (idx[d] < margin || idx[d] >= extents[d] - margin) return false;
    }
    return true;
  }

  void unflatten(long q, int* idx) const {
    for (int d = 0; d < dim; ++d) {
      idx[d] = static_cast<int>(q / strides[d]);
      q -= static_cast<long>(idx[d]) * strides[d];
    }
  }

  /// Dirichlet energy with forward differences (zero outside the box).
  double energy(const std::vector<double>& u) const {
    Kahan acc;
    std::vector<int> idx(dim, 0);
    for (long q = 0; q < npts; ++q) {
      unflatten(q, idx.data());
      for (int d = 0; d < dim; ++d) {
        const double hi = (idx[d] + 1 < extents[d]) ? u[q + strides[d]] : 0.0;
        const double diff = hi - u[q];
        acc.add(diff * diff);
      }
    }
    double scale = std::pow(h, dim - 2);
    return acc.sum * scale;
  }
};

}  // namespace

double capacity_estimate(const GridFunction& indicator, const CapacityOptions& opts) {
  indicator.assert_compact_support();
  if (indicator.dim_range() != 1) throw DomainError("capacity expects a scalar indicator");
  const LaplaceGrid grid(indicator);
  std::vector<bool> in_f(grid.npts, false);
  long fcount = 0;
  for (long q = 0; q < grid.npts; ++q) {
    if (indicator.value(0, q).real() > 0.5) {
      in_f[q] = true;
      ++fcount;
    }
  }
  if (fcount == 0) return 0.0;

  std::vector<double> u(grid.npts, 0.0);
  for (long q = 0; q < grid.npts; ++q) u[q] = in_f[q] ? 1.0 : 0.0;

  const int maxext = *std::max_element(grid.extents.begin(), grid.extents.end());
  const double omega = std::min(opts.sor_omega > 0 ? 2.0 / (1.0 + std::sin(M_PI / maxext))
                                                   : 1.0,
                                1.97);
  std::vector<int> idx(grid.dim, 0);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_update = 0.0;
    for (long q = 0; q < grid.npts; ++q) {
      if (in_f[q]) continue;
      grid.unflatten(q, idx.data());
      if (!grid.interior(idx.data())) continue;
      double nb = 0.0;
      for (int d = 0; d < grid.dim; ++d) {
        nb += (idx[d] + 1 < grid.extents[d]) ? u[q + grid.strides[d]] : 0.0;
        nb += (idx[d] - 1 >= 0) ? u[q - grid.strides[d]] : 0.0;
      }
      const double target = nb / (2.0 * grid.dim);
      const double next = u[q] + omega * (target - u[q]);
      max_update = std::max(max_update, std::abs(next - u[q]));
      u[q] = next;
    }
    if (max_update < opts.update_tol) break;
  }
  return grid.energy(u);
}

namespace {

/// Conjugate-gradient solve of the Dirichlet Laplacian (-Delta_h) u = rhs.
void laplace_solve(const LaplaceGrid& grid, const std::vector<double>& rhs,
                   std::vector<double>& u, int max_iters, double tol) {
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  std::vector<int> idx(grid.dim, 0);
  std::vector<bool> inter(grid.npts, false);
  for (long q = 0; q < grid.npts; ++q) {
    grid.unflatten(q, idx.data());
    inter[q] = grid.interior(idx.data());
  }
  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (long q = 0; q < grid.npts; ++q) {
      if (!inter[q]) {
        out[q] = x[q];
        continue;
      }
      grid.unflatten(q, idx.data());
      double nb = 0.0;
      for (int d = 0; d < grid.dim; ++d) {
        const double hi = (idx[d] + 1 < grid.extents[d]) ? x[q + grid.strides[d]] : 0.0;
        const double lo = (idx[d] - 1 >= 0) ? x[q - grid.strides[d]] : 0.0;
        nb += hi + lo;
      }
      out[q] = (2.0 * grid.dim * x[q] - nb) * inv_h2;
    }
  };
  std::fill(u.begin(), u.end(), 0.0);
  std::vector<double> r = rhs, p = rhs, ap(grid.npts, 0.0);
  for (long q = 0; q < grid.npts; ++q) {
    if (!inter[q]) r[q] = p[q] = 0.0;
  }
  double rr = 0.0;
  for (double x : r) rr += x * x;
  const double stop = tol * tol * std::max(rr, 1e-300);
  for (int it = 0; it < max_iters && rr > stop; ++it) {
    apply(p, ap);
    double pap = 0.0;
    for (long q = 0; q < grid.npts; ++q) pap += p[q] * ap[q];
    if (pap <= 0.0) break;
    const double alpha = rr / pap;
    double rr_next = 0.0;
    for (long q = 0; q < grid.npts; ++q) {
      u[q] += alpha * p[q];
      r[q] -= alpha * ap[q];
      rr_next += r[q] * r[q];
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    for (long q = 0; q < grid.npts; ++q) p[q] = r[q] + beta * p[q];
  }
}

}  // namespace

double schrodinger_rayleigh_sup(const GridFunction& mu, const CapacityOptions& opts) {
  const LaplaceGrid grid(mu);
  const long npts = grid.npts;
  std::vector<double> m(npts);
  for (long q = 0; q < npts; ++q) m[q] = mu.value(0, q).real();

  std::vector<int> idx(grid.dim, 0);
  std::vector<double> w(npts, 0.0);
  for (long q = 0; q < npts; ++q) {
    grid.unflatten(q, idx.data());
    if (grid.interior(idx.data())) w[q] = 1.0 + m[q];
  }
  std::vector<double> rhs(npts, 0.0), next(npts, 0.0);
  const double cell = std::pow(grid.h, grid.dim);
  double ratio = 0.0;
  for (int it = 0; it < 40; ++it) {
    // rhs = mu w (in the L2 pairing, the h^n factors cancel against the
    // energy's h^{n-2} up to h^2, handled below)
    for (long q = 0; q < npts; ++q) rhs[q] = m[q] * w[q];
    laplace_solve(grid, rhs, next, 400, 1e-10);
    double nn = 0.0;
    for (double x : next) nn += x * x;
    if (nn == 0.0) return 0.0;
    const double scale = 1.0 / std::sqrt(nn);
    for (long q = 0; q < npts; ++q) w[q] = next[q] * scale;
    Kahan num;
    for (long q = 0; q < npts; ++q) num.add(m[q] * w[q] * w[q]);
    const double den = grid.energy(w);
    ratio = den > 0 ? num.sum * cell / den : 0.0;
  }
  return ratio;
}

Verdict check_schrodinger_capacity(const GridFunction& mu, const Exponent& e,
                                   const std::vector<GridFunction>& test_sets,
                                   bool allow_signed, const CapacityOptions& opts,
                                   const Tolerances& tol) {
  mu.assert_compact_support();
  if (!allow_signed) {
    for (const Complex& z : mu.values()) {
      if (z.real() < 0.0) {
        throw DomainError("mu must be a nonnegative density (use the signed-charge flag)");
      }
    }
  }
  if (test_sets.empty()) throw ConfigError("capacity check requires at least one test set");

  Verdict v;
  v.criterion_id = "schrodinger-capacity";
  const double sufficient_cap = 1.0 / (e.p() * e.conjugate());
  const double necessary_cap = 4.0 / (e.p() * e.conjugate());
  double worst_ratio = 0.0;
  int worst_set = -1;
  for (std::size_t i = 0; i < test_sets.size(); ++i) {
    const GridFunction& f = test_sets[i];
    if (!f.same_grid(mu)) throw ConfigError("test sets must live on mu's grid");
    Kahan mass;
    for (long q = 0; q < mu.num_points(); ++q) {
      if (f.value(0, q).real() > 0.5) mass.add(mu.value(0, q).real());
    }
    const double mu_f = mass.sum * mu.cell_volume();
    const double cap = capacity_estimate(f, opts);
    const double ratio = cap > 0.0 ? mu_f / cap : (mu_f > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    v.details["ratio_" + std::to_string(i)] = ratio;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_set = static_cast<int>(i);
    }
  }
  v.details["worst_ratio"] = worst_ratio;
  v.margin = sufficient_cap - worst_ratio;

  const double rayleigh = schrodinger_rayleigh_sup(mu, opts);
  v.details["rayleigh_sup"] = rayleigh;
  v.details["form_margin"] = e.cpp() - rayleigh;

  if (worst_ratio <= sufficient_cap + tol.form_at(1.0)) {
    v.status = Status::SufficientHolds;
  } else if (worst_ratio > necessary_cap + tol.form_at(1.0)) {
    v.status = Status::NecessaryFails;
    Certificate c;
    c.kind = "test-set";
    c.sample_index = worst_set;
    c.value = worst_ratio;
    v.certificate = c;
  } else {
    v.status = Status::Indeterminate;
  }
  return v;
}

}  // namespace dissip
