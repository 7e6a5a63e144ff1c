#include "dissip/probe.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

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

/// Per-point view of a scalar spec's coefficients (constant broadcast).
struct ScalarCoeffs {
  explicit ScalarCoeffs(const OperatorSpec& spec, long npts) : npts_(npts) {
    if (spec.kind != OperatorKind::Scalar) throw ConfigError("expected a scalar spec");
    auto check = [&](std::size_t sz, const char* name) {
      if (sz > 1 && static_cast<long>(sz) != npts) {
        throw ConfigError(std::string("field ") + name + " sample count does not match the grid");
      }
    };
    check(spec.A.size(), "A");
    check(spec.b.size(), "b");
    check(spec.c.size(), "c");
    check(spec.a.size(), "a");
    check(spec.div_b.size(), "div_b");
    check(spec.div_c.size(), "div_c");
    A = &spec.A;
    b = &spec.b;
    c = &spec.c;
    a = &spec.a;
    div_b = &spec.div_b;
    div_c = &spec.div_c;
  }
  template <typename T>
  static const T* at(const std::vector<T>& f, long q) {
    if (f.empty()) return nullptr;
    return f.size() == 1 ? &f[0] : &f[static_cast<std::size_t>(q)];
  }
  const Eigen::MatrixXcd* A_at(long q) const { return at(*A, q); }
  const Eigen::VectorXcd* b_at(long q) const { return at(*b, q); }
  const Eigen::VectorXcd* c_at(long q) const { return at(*c, q); }
  const Complex* a_at(long q) const { return at(*a, q); }
  const Complex* div_b_at(long q) const { return at(*div_b, q); }
  const Complex* div_c_at(long q) const { return at(*div_c, q); }

  long npts_;
  const std::vector<Eigen::MatrixXcd>* A;
  const std::vector<Eigen::VectorXcd>* b;
  const std::vector<Eigen::VectorXcd>* c;
  const std::vector<Complex>* a;
  const std::vector<Complex>* div_b;
  const std::vector<Complex>* div_c;
};

Complex power_map(Complex z, double q, double eps) {
  const double m2 = std::norm(z) + eps * eps;
  return std::pow(m2, 0.5 * (q - 2.0)) * z;
}

/// Workspace evaluating the sesquilinear form Re L(f, g) with f, g derived
/// from a single grid function u; supports O(1) local re-evaluation around a
/// perturbed point for finite-difference gradients.
class FormWorkspace {
 public:
  FormWorkspace(const OperatorSpec& spec, const Exponent& e, const GridFunction& proto,
                double eps0)
      : coeffs_(spec, proto.num_points()),
        e_(e),
        eps0_(eps0),
        dim_(proto.dim_domain()),
        extents_(proto.extents()),
        h_(proto.spacing()),
        npts_(proto.num_points()) {
    strides_.assign(dim_, 1);
    for (int d = dim_ - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * extents_[d + 1];
    cell_ = 1.0;
    for (int d = 0; d < dim_; ++d) cell_ *= h_;
    u_.assign(npts_, Complex(0, 0));
    f_.assign(npts_, Complex(0, 0));
    g_.assign(npts_, Complex(0, 0));
  }

  void load(const std::vector<Complex>& u) {
    u_ = u;
    double mx = 0.0;
    for (const Complex& z : u_) mx = std::max(mx, std::abs(z));
    eps_ = eps0_ * mx;
    for (long q = 0; q < npts_; ++q) transform_point(q);
  }

  double total() const {
    Kahan k;
    std::vector<int> idx(dim_, 0);
    for (long q = 0; q < npts_; ++q) {
      unflatten(q, idx.data());
      k.add(contribution(q, idx.data()));
    }
    return k.sum * cell_;
  }

  /// Contributions (times cell volume) of the points whose integrand reads
  /// the value at j: j itself and its 2*dim axis neighbors.
  double local_sum(long j, const int* jidx) const {
    double s = contribution(j, jidx);
    std::vector<int> idx(jidx, jidx + dim_);
    for (int d = 0; d < dim_; ++d) {
      for (int step : {-1, +1}) {
        idx[d] = jidx[d] + step;
        if (idx[d] >= 0 && idx[d] < extents_[d]) {
          s += contribution(j + step * strides_[d], idx.data());
        }
      }
      idx[d] = jidx[d];
    }
    return s * cell_;
  }

  void set_point(long j, Complex value) {
    u_[j] = value;
    transform_point(j);
  }
  Complex point(long j) const { return u_[j]; }

  void unflatten(long q, int* idx) const {
    for (int d = 0; d < dim_; ++d) {
      idx[d] = static_cast<int>(q / strides_[d]);
      q -= static_cast<long>(idx[d]) * strides_[d];
    }
  }

  int dim() const { return dim_; }
  const std::vector<int>& extents() const { return extents_; }

 private:
  void transform_point(long q) {
    if (e_.p() >= 2.0) {
      f_[q] = u_[q];
      g_[q] = power_map(u_[q], e_.p(), eps_);
    } else {
      f_[q] = power_map(u_[q], e_.conjugate(), eps_);
      g_[q] = u_[q];
    }
  }

  Complex diff(const std::vector<Complex>& vals, long q, const int* idx, int d) const {
    const Complex hi = (idx[d] + 1 < extents_[d]) ? vals[q + strides_[d]] : Complex(0, 0);
    const Complex lo = (idx[d] - 1 >= 0) ? vals[q - strides_[d]] : Complex(0, 0);
    return (hi - lo) / (2.0 * h_);
  }

  double contribution(long q, const int* idx) const {
    Complex grad_f[8], grad_g[8];
    for (int d = 0; d < dim_; ++d) {
      grad_f[d] = diff(f_, q, idx, d);
      grad_g[d] = diff(g_, q, idx, d);
    }
    Complex acc(0, 0);
    if (const Eigen::MatrixXcd* A = coeffs_.A_at(q)) {
      for (int hrow = 0; hrow < dim_; ++hrow) {
        Complex row(0, 0);
        for (int kcol = 0; kcol < dim_; ++kcol) row += (*A)(hrow, kcol) * grad_f[kcol];
        acc += row * std::conj(grad_g[hrow]);
      }
    }
    if (const Eigen::VectorXcd* b = coeffs_.b_at(q)) {
      Complex drift(0, 0);
      for (int d = 0; d < dim_; ++d) drift += (*b)[d] * grad_f[d];
      acc -= drift * std::conj(g_[q]);
    }
    if (const Eigen::VectorXcd* c = coeffs_.c_at(q)) {
      Complex adj(0, 0);
      for (int d = 0; d < dim_; ++d) adj += (*c)[d] * std::conj(grad_g[d]);
      acc += f_[q] * adj;
    }
    if (const Complex* a = coeffs_.a_at(q)) {
      acc -= (*a) * f_[q] * std::conj(g_[q]);
    }
    return acc.real();
  }

  ScalarCoeffs coeffs_;
  Exponent e_;
  double eps0_, eps_ = 0.0;
  int dim_;
  std::vector<int> extents_;
  double h_;
  long npts_;
  std::vector<long> strides_;
  double cell_;
  std::vector<Complex> u_, f_, g_;
};

void check_grid_matches_spec(const GridFunction& u, const OperatorSpec& spec) {
  if (u.dim_domain() != spec.n) throw ConfigError("grid dimension does not match the spec");
  if (spec.coefficient_class == CoefficientClass::SmoothSampled && spec.grid) {
    if (spec.grid->extents != u.extents() || spec.grid->spacing != u.spacing()) {
      throw ConfigError("sampled coefficients live on a different grid than u");
    }
  }
}

}  // namespace

double evaluate_scalar_form(const GridFunction& u, const OperatorSpec& spec, const Exponent& e,
                            double eps0) {
  u.assert_compact_support();
  check_grid_matches_spec(u, spec);
  if (u.dim_range() != 1) throw ConfigError("scalar form expects a scalar grid function");
  FormWorkspace ws(spec, e, u, eps0);
  std::vector<Complex> vals(u.values().begin(), u.values().end());
  ws.load(vals);
  return ws.total();
}

std::vector<double> evaluate_scalar_form_trend(const GridFunction& u, const OperatorSpec& spec,
                                               const Exponent& e) {
  std::vector<double> out;
  for (double eps0 : {1e-5, 1e-6, 1e-7}) {
    out.push_back(evaluate_scalar_form(u, spec, e, eps0));
  }
  return out;
}

double evaluate_lemma1_functional(const GridFunction& v, const OperatorSpec& spec,
                                  const Exponent& e) {
  v.assert_compact_support();
  check_grid_matches_spec(v, spec);
  if (v.dim_range() != 1) throw ConfigError("lemma functional expects a scalar grid function");
  const long npts = v.num_points();
  ScalarCoeffs coeffs(spec, npts);
  const bool need_divs = !spec.b.empty() || !spec.c.empty();
  if (need_divs && spec.coefficient_class == CoefficientClass::SmoothSampled &&
      ((!spec.b.empty() && spec.div_b.empty()) || (!spec.c.empty() && spec.div_c.empty()))) {
    throw ConfigError("lemma functional requires sampled div_b/div_c fields");
  }
  const int dim = v.dim_domain();
  const double w = e.skew_weight();

  // Modulus grid.
  std::vector<Complex> mod(npts);
  double vmax = 0.0;
  for (long q = 0; q < npts; ++q) {
    const double m = std::abs(v.value(0, q));
    mod[q] = Complex(m, 0.0);
    vmax = std::max(vmax, m);
  }
  const double zero_cut = 1e-12 * vmax;
  GridFunction modg(v.dim_domain(), 1, v.origin(), v.spacing(), v.extents(), v.support_margin(),
                    std::move(mod));

  Kahan k;
  std::vector<int> idx(dim, 0);
  Complex gv[8];
  double gm[8];
  for (long q = 0; q < npts; ++q) {
    modg.unflatten(q, idx.data());
    for (int d = 0; d < dim; ++d) {
      gv[d] = v.diff(0, idx.data(), d);
      gm[d] = modg.diff(0, idx.data(), d).real();
    }
    const Complex vq = v.value(0, q);
    const double m = std::abs(vq);
    Complex acc(0, 0);
    double racc = 0.0;
    if (const Eigen::MatrixXcd* A = coeffs.A_at(q)) {
      // <A grad v, grad v> - (1-2/p)^2 <A grad|v|, grad|v|>
      for (int hrow = 0; hrow < dim; ++hrow) {
        Complex row(0, 0), rowm(0, 0);
        for (int kcol = 0; kcol < dim; ++kcol) {
          row += (*A)(hrow, kcol) * gv[kcol];
          rowm += (*A)(hrow, kcol) * gm[kcol];
        }
        acc += row * std::conj(gv[hrow]);
        acc -= (w * w) * rowm * gm[hrow];
      }
      // -(1-2/p) <(A - A*) grad|v|, |v|^-1 conj(v) grad v>,  zero-extended
      if (m > zero_cut) {
        for (int hrow = 0; hrow < dim; ++hrow) {
          Complex rowm(0, 0);
          for (int kcol = 0; kcol < dim; ++kcol) {
            rowm += ((*A)(hrow, kcol) - std::conj((*A)(kcol, hrow))) * gm[kcol];
          }
          acc -= w * rowm * (vq * std::conj(gv[hrow])) / m;
        }
      }
    }
    // <Im(b+c), Im(conj(v) grad v)>
    const Eigen::VectorXcd* bq = coeffs.b_at(q);
    const Eigen::VectorXcd* cq = coeffs.c_at(q);
    if (bq || cq) {
      for (int d = 0; d < dim; ++d) {
        double imbc = 0.0;
        if (bq) imbc += (*bq)[d].imag();
        if (cq) imbc += (*cq)[d].imag();
        racc += imbc * (std::conj(vq) * gv[d]).imag();
      }
    }
    // Re(div(b/p - c/p') - a) |v|^2
    double zer = 0.0;
    if (const Complex* db = coeffs.div_b_at(q)) zer += db->real() / e.p();
    if (const Complex* dc = coeffs.div_c_at(q)) zer -= dc->real() / e.conjugate();
    if (const Complex* aq = coeffs.a_at(q)) zer -= aq->real();
    racc += zer * m * m;

    k.add(acc.real() + racc);
  }
  return k.sum * v.cell_volume();
}

namespace {

GridFunction random_start(const GridFunction& proto, std::mt19937_64& rng, int flavor) {
  GridFunction g = GridFunction::zeros(proto.dim_domain(), 1, proto.origin(), proto.spacing(),
                                       proto.extents(), proto.support_margin());
  const int dim = g.dim_domain();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<int> idx(dim, 0);
  // Smooth envelope times either noise or a random plane-wave phase.
  Eigen::VectorXd wave(dim);
  for (int d = 0; d < dim; ++d) wave[d] = 3.0 * unit(rng) * (flavor % 3 == 2 ? 2.0 : 1.0);
  Eigen::VectorXd center(dim);
  for (int d = 0; d < dim; ++d) center[d] = 0.3 * unit(rng);
  for (long q = 0; q < g.num_points(); ++q) {
    g.unflatten(q, idx.data());
    bool margin = false;
    for (int d = 0; d < dim; ++d) {
      if (idx[d] < g.support_margin() || idx[d] >= g.extents()[d] - g.support_margin()) {
        margin = true;
      }
    }
    if (margin) continue;
    const Eigen::VectorXd x = g.point_at(q);
    double env = 1.0;
    for (int d = 0; d < dim; ++d) {
      const double lo = g.origin()[d];
      const double hi = g.origin()[d] + g.spacing() * (g.extents()[d] - 1);
      const double t = (x[d] - lo) / (hi - lo);
      env *= std::sin(M_PI * t) * std::sin(M_PI * t);
    }
    Complex val;
    if (flavor % 3 == 0) {
      val = Complex(gauss(rng), gauss(rng));
    } else {
      const double phase = wave.dot(x - center) * M_PI;
      val = std::exp(Complex(0.0, phase)) * (1.0 + 0.2 * gauss(rng));
    }
    g.set_value(0, q, env * val);
  }
  return g;
}

void normalize_lp(std::vector<Complex>& vals, double p, double cell) {
  double s = 0.0;
  for (const Complex& z : vals) s += std::pow(std::abs(z), p);
  const double nrm = std::pow(s * cell, 1.0 / p);
  if (nrm > 0) {
    for (Complex& z : vals) z /= nrm;
  }
}

struct RestartOutcome {
  double value = 0.0;
  std::vector<Complex> u;
  bool converged = false;
  long evaluations = 0;
};

RestartOutcome run_restart(const OperatorSpec& spec, const Exponent& e, const GridFunction& proto,
                           const SearchOptions& opts, int restart) {
  std::mt19937_64 rng(opts.seed ^ (0x9e3779b97f4a7c15ULL * (restart + 1)));
  GridFunction start = random_start(proto, rng, restart);
  std::vector<Complex> u(start.values().begin(), start.values().end());
  const double cell = proto.cell_volume();
  normalize_lp(u, e.p(), cell);

  FormWorkspace ws(spec, e, proto, opts.eps0);
  ws.load(u);
  double value = ws.total();
  long evals = 1;

  const int dim = proto.dim_domain();
  const long npts = proto.num_points();
  std::vector<double> grad(2 * npts, 0.0);
  std::vector<int> idx(dim, 0);
  bool converged = false;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (value < -1e-2) {
      converged = true;
      break;
    }
    // Finite-difference gradient via local re-evaluation.
    const double delta = 1e-6;
    double gnorm2 = 0.0;
    for (long j = 0; j < npts; ++j) {
      ws.unflatten(j, idx.data());
      bool margin = false;
      for (int d = 0; d < dim; ++d) {
        if (idx[d] < proto.support_margin() || idx[d] >= proto.extents()[d] - proto.support_margin()) {
          margin = true;
        }
      }
      if (margin) {
        grad[2 * j] = grad[2 * j + 1] = 0.0;
        continue;
      }
      const double base = ws.local_sum(j, idx.data());
      const Complex old = ws.point(j);
      ws.set_point(j, old + Complex(delta, 0.0));
      grad[2 * j] = (ws.local_sum(j, idx.data()) - base) / delta;
      ws.set_point(j, old + Complex(0.0, delta));
      grad[2 * j + 1] = (ws.local_sum(j, idx.data()) - base) / delta;
      ws.set_point(j, old);
      gnorm2 += grad[2 * j] * grad[2 * j] + grad[2 * j + 1] * grad[2 * j + 1];
    }
    evals += 2;
    const double gnorm = std::sqrt(gnorm2);
    if (gnorm < 1e-10) {
      converged = true;
      break;
    }
    // Backtracking step on the normalized iterate.
    bool improved = false;
    double step = 0.5;
    for (int bt = 0; bt < 10 && !improved; ++bt, step *= 0.5) {
      std::vector<Complex> trial = u;
      for (long j = 0; j < npts; ++j) {
        trial[j] -= (step / gnorm) * Complex(grad[2 * j], grad[2 * j + 1]);
      }
      normalize_lp(trial, e.p(), cell);
      ws.load(trial);
      const double tval = ws.total();
      ++evals;
      if (tval < value - 1e-12) {
        u = std::move(trial);
        value = tval;
        improved = true;
      }
    }
    if (!improved) {
      ws.load(u);
      converged = true;
      break;
    }
  }

  RestartOutcome out;
  out.value = value;
  out.u = std::move(u);
  out.converged = converged;
  out.evaluations = evals;
  return out;
}

}  // namespace

ProbeResult search_counterexample(const OperatorSpec& spec, const Exponent& e,
                                  const SearchOptions& opts) {
  if (spec.kind != OperatorKind::Scalar) {
    throw ConfigError("search_counterexample expects a scalar spec");
  }
  if (opts.restarts < 1 || opts.max_iters < 0) throw ConfigError("invalid search budget");

  GridFunction proto = [&] {
    if (spec.grid) {
      return GridFunction::zeros(spec.n, 1, spec.grid->origin, spec.grid->spacing,
                                 spec.grid->extents, 1);
    }
    std::vector<int> extents(spec.n, opts.grid_points);
    Eigen::VectorXd origin = Eigen::VectorXd::Constant(spec.n, -opts.box_halfwidth);
    const double h = 2.0 * opts.box_halfwidth / (opts.grid_points - 1);
    return GridFunction::zeros(spec.n, 1, origin, h, extents, 1);
  }();

  std::vector<RestartOutcome> outcomes(opts.restarts);
  if (opts.threads > 1) {
    std::vector<std::future<RestartOutcome>> futs;
    futs.reserve(opts.restarts);
    for (int r = 0; r < opts.restarts; ++r) {
      futs.push_back(std::async(std::launch::async, [&, r] {
        return run_restart(spec, e, proto, opts, r);
      }));
    }
    for (int r = 0; r < opts.restarts; ++r) outcomes[r] = futs[r].get();
  } else {
    for (int r = 0; r < opts.restarts; ++r) outcomes[r] = run_restart(spec, e, proto, opts, r);
  }

  int best = 0;
  long total_evals = 0;
  for (int r = 0; r < opts.restarts; ++r) {
    total_evals += outcomes[r].evaluations;
    if (outcomes[r].value < outcomes[best].value) best = r;
  }
  ProbeResult res;
  res.value = outcomes[best].value;
  res.converged = outcomes[best].converged;
  res.evaluations = total_evals;
  res.u_star = GridFunction(proto.dim_domain(), 1, proto.origin(), proto.spacing(),
                            proto.extents(), proto.support_margin(), std::move(outcomes[best].u));
  return res;
}

namespace {

struct SigmaIntegrals {
  double mass;        // int sigma^2
  double d1_sq;       // int (d1 sigma^2)^2
  double dirichlet;   // int |grad sigma|^2
};

SigmaIntegrals sigma_integrals(const GridFunction& sigma) {
  sigma.assert_compact_support();
  if (sigma.dim_range() != 1) throw DomainError("sigma must be scalar");
  const long npts = sigma.num_points();
  const int dim = sigma.dim_domain();
  double vmax = 0.0;
  std::vector<Complex> sq(npts);
  for (long q = 0; q < npts; ++q) {
    const double s = sigma.value(0, q).real();
    vmax = std::max(vmax, std::abs(s));
    sq[q] = Complex(s * s, 0.0);
  }
  if (vmax == 0.0) throw DomainError("sigma must not vanish identically");
  GridFunction sq_grid(dim, 1, sigma.origin(), sigma.spacing(), sigma.extents(),
                       sigma.support_margin(), std::move(sq));
  Kahan mass, d1, dir;
  std::vector<int> idx(dim, 0);
  for (long q = 0; q < npts; ++q) {
    sigma.unflatten(q, idx.data());
    const double s = sigma.value(0, q).real();
    mass.add(s * s);
    const double d1sq = sq_grid.diff(0, idx.data(), 0).real();
    d1.add(d1sq * d1sq);
    for (int d = 0; d < dim; ++d) {
      const double g = sigma.diff(0, idx.data(), d).real();
      dir.add(g * g);
    }
  }
  const double cell = sigma.cell_volume();
  return {mass.sum * cell, d1.sum * cell, dir.sum * cell};
}

}  // namespace

double sigma_modal_probe(const GridFunction& sigma, double lambda, double t) {
  const SigmaIntegrals s = sigma_integrals(sigma);
  return t * t * s.mass - t * lambda * s.d1_sq + s.dirichlet;
}

double sigma_lambda_threshold(const GridFunction& sigma) {
  const SigmaIntegrals s = sigma_integrals(sigma);
  if (s.d1_sq <= 0.0) throw DomainError("sigma^2 must vary along the first axis");
  return 2.0 * std::sqrt(s.mass * s.dirichlet) / s.d1_sq;
}

double sigma_vertex_t(const GridFunction& sigma, double lambda) {
  const SigmaIntegrals s = sigma_integrals(sigma);
  return lambda * s.d1_sq / (2.0 * s.mass);
}

OperatorSpec make_sigma_example_spec(const GridFunction& sigma, double lambda) {
  if (sigma.dim_domain() != 2) throw DomainError("sigma example lives in two dimensions");
  const long npts = sigma.num_points();
  std::vector<Complex> sq(npts);
  for (long q = 0; q < npts; ++q) {
    const double s = sigma.value(0, q).real();
    sq[q] = Complex(s * s, 0.0);
  }
  GridFunction sq_grid(2, 1, sigma.origin(), sigma.spacing(), sigma.extents(),
                       sigma.support_margin(), std::move(sq));
  OperatorSpec spec;
  spec.id = "example-sigma";
  spec.kind = OperatorKind::Scalar;
  spec.n = 2;
  spec.m = 1;
  spec.coefficient_class = CoefficientClass::SmoothSampled;
  spec.A.reserve(npts);
  std::vector<int> idx(2, 0);
  for (long q = 0; q < npts; ++q) {
    sq_grid.unflatten(q, idx.data());
    const double d1 = sq_grid.diff(0, idx.data(), 0).real();
    Eigen::MatrixXcd A(2, 2);
    A << Complex(1, 0), Complex(0, lambda * d1), Complex(0, -lambda * d1), Complex(1, 0);
    spec.A.push_back(std::move(A));
  }
  FieldGrid fg;
  fg.origin = sigma.origin();
  fg.spacing = sigma.spacing();
  fg.extents = sigma.extents();
  spec.grid = fg;
  spec.validate();
  return spec;
}

}  // namespace dissip
