#include "dissip/lame_probe.hpp"

#include <algorithm>
#include <cmath>

#include "dissip/errors.hpp"
#include "dissip/operator_spec.hpp"

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

double gamma_of(double nu) { return 1.0 / (1.0 - 2.0 * nu); }

}  // namespace

double lame_form(const GridFunction& v, double nu, const Exponent& e) {
  if (!elasticity_nu_admissible(nu)) throw DomainError("inadmissible Poisson ratio");
  v.assert_compact_support();
  const int dim = v.dim_domain();
  const int m = v.dim_range();
  if (m != dim) throw ConfigError("elasticity field must have one component per dimension");
  const double cp = e.cp();
  const double gamma = gamma_of(nu);
  const long npts = v.num_points();

  std::vector<Complex> mod(npts);
  double vmax = 0.0;
  for (long q = 0; q < npts; ++q) {
    double m2 = 0.0;
    for (int c = 0; c < m; ++c) m2 += std::norm(v.value(c, q));
    const double a = std::sqrt(m2);
    mod[q] = Complex(a, 0.0);
    vmax = std::max(vmax, a);
  }
  const double zero_cut = 1e-12 * vmax;
  GridFunction modg(dim, 1, v.origin(), v.spacing(), v.extents(), v.support_margin(),
                    std::move(mod));

  Kahan k;
  std::vector<int> idx(dim, 0);
  double gm[8];
  for (long q = 0; q < npts; ++q) {
    modg.unflatten(q, idx.data());
    double grad_mod_sq = 0.0;
    for (int d = 0; d < dim; ++d) {
      gm[d] = modg.diff(0, idx.data(), d).real();
      grad_mod_sq += gm[d] * gm[d];
    }
    double sum_grads = 0.0;
    Complex div(0, 0);
    Complex radial(0, 0);
    for (int c = 0; c < m; ++c) {
      for (int d = 0; d < dim; ++d) {
        const Complex g = v.diff(c, idx.data(), d);
        sum_grads += std::norm(g);
        if (d == c) div += g;
      }
      radial += v.value(c, q) * gm[c];
    }
    const double a = modg.value(0, q).real();
    const double rad = (a > zero_cut) ? std::norm(radial) / (a * a) : 0.0;
    k.add(cp * grad_mod_sq - sum_grads + gamma * cp * rad - gamma * std::norm(div));
  }
  return k.sum * v.cell_volume();
}

namespace {

double smooth_window(double t, double lo, double hi) {
  if (t <= lo || t >= hi) return 0.0;
  const double s = std::sin(M_PI * (t - lo) / (hi - lo));
  return s * s;
}

GridFunction planar_proto(const LameSearchOptions& opts) {
  std::vector<int> extents(2, opts.grid_points);
  Eigen::VectorXd origin = Eigen::VectorXd::Constant(2, -opts.box_halfwidth);
  const double h = 2.0 * opts.box_halfwidth / (opts.grid_points - 1);
  return GridFunction::zeros(2, 2, origin, h, extents, 1);
}

/// v = window(x) (omega + delta lambda cos(mu <xi, x> + phase)), with lambda
/// perpendicular to xi and omega = a xi + sqrt(1-a^2) lambda; reproduces the
/// pointwise necessary polynomial at leading order in delta and mu.
bool in_margin(const GridFunction& g, const int* idx) {
  for (int d = 0; d < g.dim_domain(); ++d) {
    if (idx[d] < g.support_margin() || idx[d] >= g.extents()[d] - g.support_margin()) return true;
  }
  return false;
}

GridFunction plane_wave_field(const GridFunction& proto, double xi_angle, double a_frac,
                              double delta, double mu, double phase) {
  GridFunction g = proto;
  const double box = -proto.origin()[0];
  const Eigen::Vector2d xi(std::cos(xi_angle), std::sin(xi_angle));
  const Eigen::Vector2d lam(-xi[1], xi[0]);
  const double a = std::clamp(a_frac, -1.0, 1.0);
  const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
  const Eigen::Vector2d omega = a * xi + b * lam;
  std::vector<int> idx(2, 0);
  for (long q = 0; q < g.num_points(); ++q) {
    g.unflatten(q, idx.data());
    if (in_margin(g, idx.data())) continue;
    const Eigen::VectorXd x = g.point_at(q);
    const double w = smooth_window(x[0], -0.92 * box, 0.92 * box) *
                     smooth_window(x[1], -0.92 * box, 0.92 * box);
    if (w == 0.0) continue;
    const double osc = std::cos(mu * xi.dot(x.head<2>()) + phase);
    for (int c = 0; c < 2; ++c) {
      g.set_value(c, q, Complex(w * (omega[c] + delta * lam[c] * osc), 0.0));
    }
  }
  return g;
}

/// v = psi(rho) (e_theta + delta lambda(x) cos(alpha log rho + beta theta
/// + phase)) with lambda perpendicular to the spiral phase gradient; the
/// rotational base is divergence-free with angle-independent modulus, so the
/// perturbation sees the optimal polynomial geometry on the whole ring.
GridFunction spiral_field(const GridFunction& proto, double alpha, double beta, double delta,
                          double phase, double rmin_frac, double rmax_frac) {
  GridFunction g = proto;
  const double box = -proto.origin()[0];
  const double nrm = std::hypot(alpha, beta);
  std::vector<int> idx(2, 0);
  for (long q = 0; q < g.num_points(); ++q) {
    g.unflatten(q, idx.data());
    if (in_margin(g, idx.data())) continue;
    const Eigen::VectorXd x = g.point_at(q);
    const double rho = std::hypot(x[0], x[1]);
    const double w = smooth_window(rho, rmin_frac * box, rmax_frac * box);
    if (w == 0.0 || rho == 0.0) continue;
    const double ct = x[0] / rho, st = x[1] / rho;
    const double er[2] = {ct, st};
    const double et[2] = {-st, ct};
    const double theta = std::atan2(x[1], x[0]);
    const double osc = std::cos(alpha * std::log(rho) + beta * theta + phase);
    for (int c = 0; c < 2; ++c) {
      const double lam = nrm > 0 ? (-beta * er[c] + alpha * et[c]) / nrm : 0.0;
      g.set_value(c, q, Complex(w * (et[c] + delta * lam * osc), 0.0));
    }
  }
  return g;
}

void normalize_l2(GridFunction& g) {
  double s = 0.0;
  for (const Complex& z : g.values()) s += std::norm(z);
  const double nrm = std::sqrt(s * g.cell_volume());
  if (nrm > 0) {
    for (Complex& z : g.mutable_values()) z /= nrm;
  }
}

}  // namespace

ProbeResult lame_counterexample_search(double nu, const Exponent& e,
                                       const LameSearchOptions& opts) {
  if (!elasticity_nu_admissible(nu)) throw DomainError("inadmissible Poisson ratio");
  if (opts.grid_points < 9) throw ConfigError("lame search grid too coarse");
  const GridFunction proto = planar_proto(opts);
  const double gamma = gamma_of(nu);

  ProbeResult res;
  res.value = -std::numeric_limits<double>::infinity();
  long evals = 0;
  auto consider = [&](GridFunction&& cand) {
    normalize_l2(cand);
    const double val = lame_form(cand, nu, e);
    ++evals;
    if (val > res.value) {
      res.value = val;
      res.u_star = std::move(cand);
    }
    return val;
  };

  // Family parameters as vectors so coordinate refinement can walk them.
  const double a_opt = gamma > 1.0 ? std::sqrt((gamma - 1.0) / (2.0 * gamma)) : 0.5;
  std::vector<double> best_params;
  int best_family = -1;

  for (double delta : {0.3, 0.6, 1.0, 1.5}) {
    for (double mu : {6.0, 8.0, 10.0, 12.0}) {
      for (double angle : {0.0, M_PI / 4}) {
        for (double a : {0.8 * a_opt, a_opt, std::min(1.0, 1.2 * a_opt)}) {
          for (double phase : {0.0, M_PI / 2}) {
            const double val =
                consider(plane_wave_field(proto, angle, a, delta, mu, phase));
            if (val == res.value && res.u_star) {
              best_family = 0;
              best_params = {angle, a, delta, mu, phase};
            }
          }
        }
      }
    }
  }
  for (double alpha : {4.0, 6.0, 8.0, 10.0}) {
    for (double beta : {0.0, 1.0, 2.0, 3.0, 4.0}) {
      for (double delta : {0.3, 0.6, 1.0, 1.5}) {
        for (double phase : {0.0, M_PI / 2}) {
          const double val = consider(spiral_field(proto, alpha, beta, delta, phase, 0.3, 0.92));
          if (val == res.value && res.u_star) {
            best_family = 1;
            best_params = {alpha, beta, delta, phase, 0.3, 0.92};
          }
        }
      }
    }
  }

  // Coordinate refinement around the best seed.
  for (int sweep = 0; sweep < opts.refine_sweeps && best_family >= 0; ++sweep) {
    for (std::size_t k = 0; k < best_params.size(); ++k) {
      for (double step : {-0.25, -0.1, 0.1, 0.25}) {
        std::vector<double> trial = best_params;
        trial[k] += step;
        GridFunction cand =
            best_family == 0
                ? plane_wave_field(proto, trial[0], trial[1], trial[2], trial[3], trial[4])
                : spiral_field(proto, trial[0], trial[1], trial[2], trial[3], trial[4], trial[5]);
        normalize_l2(cand);
        const double val = lame_form(cand, nu, e);
        ++evals;
        if (val > res.value) {
          res.value = val;
          res.u_star = std::move(cand);
          best_params = trial;
        }
      }
    }
  }

  res.converged = true;
  res.evaluations = evals;
  return res;
}

namespace {

struct RadialTerms {
  double value;
  double scale;
};

RadialTerms weighted_radial_quadrature(const GridFunction& profile, int n, double nu,
                                       double alpha, const Exponent& e) {
  if (n < 2) throw DomainError("weighted probe requires dimension n >= 2");
  if (!elasticity_nu_admissible(nu)) throw DomainError("inadmissible Poisson ratio");
  profile.assert_compact_support();
  if (profile.dim_domain() != 1 || profile.dim_range() != 1) {
    throw ConfigError("radial profile must be a scalar 1-d grid function");
  }
  if (profile.origin()[0] <= 0.0) {
    throw DomainError("radial profile must be sampled at rho > 0 (support in (0, inf))");
  }
  const double h = profile.spacing();
  const long npts = profile.num_points();
  const double p = e.p();
  const double gamma = gamma_of(nu);
  const double surface = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
  const double prefactor = surface * (1.0 + gamma);

  Kahan val, mag;
  for (long i = 0; i < npts; ++i) {
    const Complex f = profile.value(0, i);
    const Complex fp = (i + 1 < npts ? profile.value(0, i + 1) : Complex(0, 0));
    const Complex fm = (i - 1 >= 0 ? profile.value(0, i - 1) : Complex(0, 0));
    const double rho = profile.origin()[0] + h * i;
    const Complex d1 = (fp - fm) / (2.0 * h);
    const Complex d2 = (fp - 2.0 * f + fm) / (h * h);
    const Complex lf = d2 + (n - 1.0) * d1 / rho - (n - 1.0) * f / (rho * rho);
    const double fabsv = std::abs(f);
    const Complex dual = fabsv > 0 ? std::pow(fabsv, p - 2.0) * f : Complex(0, 0);
    const double weight = std::pow(rho, n - 1.0 - alpha);
    const double term = (lf * std::conj(dual)).real() * weight;
    val.add(term);
    mag.add(std::abs(lf) * std::abs(dual) * weight);
  }
  return {prefactor * val.sum * h, std::abs(prefactor) * mag.sum * h};
}

}  // namespace

double weighted_lame_probe(const GridFunction& profile, int n, double nu, double alpha,
                           const Exponent& e) {
  return weighted_radial_quadrature(profile, n, nu, alpha, e).value;
}

double weighted_lame_scale(const GridFunction& profile, int n, double nu, double alpha,
                           const Exponent& e) {
  return weighted_radial_quadrature(profile, n, nu, alpha, e).scale;
}

ProbeResult weighted_profile_search(int n, double nuv, double alpha, const Exponent& e,
                                    const WeightedSearchOptions& opts) {
  if (opts.grid_points < 16 || opts.rho_min <= 0.0 || opts.rho_max <= opts.rho_min) {
    throw ConfigError("invalid weighted search options");
  }
  const double h = (opts.rho_max - opts.rho_min) / (opts.grid_points - 1);
  Eigen::VectorXd origin(1);
  origin[0] = opts.rho_min;

  auto make_profile = [&](double kappa, double lo, double hi) {
    return GridFunction::sample(
        1, 1, origin, h, {opts.grid_points}, 1, [&](const Eigen::VectorXd& x, int) {
          const double rho = x[0];
          if (rho <= lo || rho >= hi) return Complex(0, 0);
          const double t = (std::log(rho) - std::log(lo)) / (std::log(hi) - std::log(lo));
          const double w = std::sin(M_PI * t);
          return Complex(std::pow(rho, kappa) * w * w, 0.0);
        });
  };

  const double kappa0 = (alpha - n + 2.0) / e.p();
  ProbeResult res;
  res.value = -std::numeric_limits<double>::infinity();
  std::vector<double> best = {kappa0, 1.2 * opts.rho_min, 0.95 * opts.rho_max};
  long evals = 0;
  auto consider = [&](double kappa, double lo, double hi) {
    if (lo <= opts.rho_min || hi >= opts.rho_max || hi <= 1.5 * lo) return;
    GridFunction f = make_profile(kappa, lo, hi);
    if (f.max_abs() == 0.0) return;
    const double nrm = f.max_abs();
    for (Complex& z : f.mutable_values()) z /= nrm;
    const double val = weighted_lame_probe(f, n, nuv, alpha, e);
    ++evals;
    if (val > res.value) {
      res.value = val;
      res.u_star = std::move(f);
      best = {kappa, lo, hi};
    }
  };

  for (double dk : {-1.0, -0.5, -0.2, 0.0, 0.2, 0.5, 1.0}) {
    for (double lo : {1.2 * opts.rho_min, 2.0 * opts.rho_min, 4.0 * opts.rho_min}) {
      consider(kappa0 + dk, lo, 0.95 * opts.rho_max);
    }
  }
  for (int sweep = 0; sweep < opts.refine_sweeps; ++sweep) {
    const std::vector<double> cur = best;
    for (double dk : {-0.1, 0.1}) consider(cur[0] + dk, cur[1], cur[2]);
    for (double dl : {0.7, 1.4}) consider(cur[0], cur[1] * dl, cur[2]);
    for (double dh : {0.9, 0.99}) consider(cur[0], cur[1], cur[2] * dh);
  }
  res.converged = true;
  res.evaluations = evals;
  return res;
}

}  // namespace dissip
