#include "dissip/oblique.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

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

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void dft(std::vector<Complex>& data, const std::vector<int>& dims, int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                         reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()),
                         sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
}

double sphere_measure(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

double poisson_kernel(int n, double dist_sq, double t) {
  return (2.0 / sphere_measure(n)) * t / std::pow(dist_sq + t * t, 0.5 * n);
}

/// Padded periodic workspace shared by the spectral routines.
struct PaddedBox {
  std::vector<int> dims;     // padded extents per axis
  long total = 1;
  double h = 0.0;
  int d = 0;

  PaddedBox(const GridFunction& u, int padding_factor) {
    if (padding_factor < 4) {
      throw ConfigError("spectral multiplier requires padding_factor >= 4");
    }
    d = u.dim_domain();
    h = u.spacing();
    dims.resize(d);
    for (int a = 0; a < d; ++a) {
      dims[a] = padding_factor * u.extents()[a];
      total *= dims[a];
    }
  }

  std::vector<Complex> embed(const GridFunction& u) const {
    std::vector<Complex> out(total, Complex(0, 0));
    std::vector<int> idx(d, 0);
    for (long q = 0; q < u.num_points(); ++q) {
      u.unflatten(q, idx.data());
      long f = 0;
      for (int a = 0; a < d; ++a) f = f * dims[a] + idx[a];
      out[f] = u.value(0, q);
    }
    return out;
  }

  /// |xi| at the wrapped frequency multi-index of flat k.
  double freq_norm(long k) const {
    double s = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      int ka = static_cast<int>(k % dims[a]);
      k /= dims[a];
      if (ka > dims[a] / 2) ka -= dims[a];
      const double xi = 2.0 * M_PI * ka / (dims[a] * h);
      s += xi * xi;
    }
    return std::sqrt(s);
  }
};

}  // namespace

HalfSpaceFunction harmonic_extension(const GridFunction& u, const std::vector<double>& levels) {
  u.assert_compact_support();
  if (u.dim_range() != 1) throw ConfigError("harmonic extension expects a scalar trace");
  const int d = u.dim_domain();
  const int n = d + 1;
  for (double t : levels) {
    if (t <= 0.0) throw DomainError("extension levels must be positive");
  }
  const long npts = u.num_points();
  std::vector<Eigen::VectorXd> pts(npts);
  for (long q = 0; q < npts; ++q) pts[q] = u.point_at(q);

  HalfSpaceFunction out{u, levels, {}};
  out.values.reserve(levels.size());
  const double cell = u.cell_volume();
  for (double t : levels) {
    std::vector<Complex> level(npts, Complex(0, 0));
    for (long x = 0; x < npts; ++x) {
      Kahan re, im;
      for (long y = 0; y < npts; ++y) {
        const Complex uy = u.value(0, y);
        if (uy == Complex(0, 0)) continue;
        const double dist_sq = (pts[x] - pts[y]).squaredNorm();
        const double w = poisson_kernel(n, dist_sq, t);
        re.add(w * uy.real());
        im.add(w * uy.imag());
      }
      level[x] = Complex(re.sum, im.sum) * cell;
    }
    out.values.push_back(std::move(level));
  }
  return out;
}

double poisson_kernel_mass(const GridFunction& u, double level) {
  if (level <= 0.0) throw DomainError("extension levels must be positive");
  const int n = u.dim_domain() + 1;
  Kahan acc;
  Eigen::VectorXd center = u.origin();
  for (int a = 0; a < u.dim_domain(); ++a) {
    center[a] += 0.5 * u.spacing() * (u.extents()[a] - 1);
  }
  for (long q = 0; q < u.num_points(); ++q) {
    const double dist_sq = (u.point_at(q) - center).squaredNorm();
    acc.add(poisson_kernel(n, dist_sq, level));
  }
  return acc.sum * u.cell_volume();
}

double lambda_half_form(const GridFunction& u, const GridFunction& v, int padding_factor) {
  if (!u.same_grid(v)) throw ConfigError("spectral pairing requires a common grid");
  const PaddedBox box(u, padding_factor);
  std::vector<Complex> fu = box.embed(u);
  std::vector<Complex> fv = box.embed(v);
  dft(fu, box.dims, FFTW_FORWARD);
  dft(fv, box.dims, FFTW_FORWARD);
  Kahan acc;
  for (long k = 0; k < box.total; ++k) {
    acc.add(box.freq_norm(k) * (fu[k] * std::conj(fv[k])).real());
  }
  double cell = 1.0;
  for (int a = 0; a < box.d; ++a) cell *= box.h;
  return acc.sum * cell / static_cast<double>(box.total);
}

double lambda_half_energy_physical(const GridFunction& u, int padding_factor) {
  const PaddedBox box(u, padding_factor);
  std::vector<Complex> fu = box.embed(u);
  dft(fu, box.dims, FFTW_FORWARD);
  for (long k = 0; k < box.total; ++k) {
    fu[k] *= std::sqrt(box.freq_norm(k)) / static_cast<double>(box.total);
  }
  dft(fu, box.dims, FFTW_BACKWARD);
  Kahan acc;
  for (long k = 0; k < box.total; ++k) acc.add(std::norm(fu[k]));
  double cell = 1.0;
  for (int a = 0; a < box.d; ++a) cell *= box.h;
  return acc.sum * cell;
}

double extension_dirichlet_energy(const GridFunction& u, double dt, double height) {
  if (dt <= 0.0 || height <= dt) throw ConfigError("invalid layer spacing for the energy quadrature");
  const int d = u.dim_domain();
  const int levels = static_cast<int>(std::floor(height / dt));
  std::vector<double> heights(levels);
  for (int l = 0; l < levels; ++l) heights[l] = (l + 1) * dt;
  HalfSpaceFunction ext = harmonic_extension(u, heights);

  const long npts = u.num_points();
  auto layer = [&](int l) -> const std::vector<Complex>& { return ext.values[l]; };
  std::vector<Complex> base(u.values().begin(), u.values().end());

  GridFunction work = GridFunction::zeros(d, 1, u.origin(), u.spacing(), u.extents(), 1);
  std::vector<int> idx(d, 0);
  Kahan energy;
  const std::vector<Complex>* below = &base;
  for (int l = 0; l < levels; ++l) {
    const std::vector<Complex>& above = layer(l);
    // Midlevel lateral gradient + vertical difference, midpoint rule in t.
    // The extension does not vanish at the window edge, so lateral
    // derivatives are only taken where both neighbors are in the grid
    // (the zero extension would fake a kink there).
    Kahan lat, vert;
    for (long q = 0; q < npts; ++q) {
      work.mutable_values()[q] = 0.5 * ((*below)[q] + above[q]);
    }
    for (long q = 0; q < npts; ++q) {
      work.unflatten(q, idx.data());
      bool interior = true;
      for (int a = 0; a < d; ++a) {
        if (idx[a] < 1 || idx[a] >= u.extents()[a] - 1) interior = false;
      }
      if (interior) {
        for (int a = 0; a < d; ++a) {
          const Complex g = work.diff(0, idx.data(), a);
          lat.add(std::norm(g));
        }
      }
      const Complex dv = (above[q] - (*below)[q]) / dt;
      vert.add(std::norm(dv));
    }
    energy.add((lat.sum + vert.sum) * u.cell_volume() * dt);
    below = &above;
  }
  return energy.sum;
}

namespace {

const Eigen::VectorXcd* oblique_coeff_at(const OperatorSpec& spec, long q) {
  if (spec.a_oblique.empty()) return nullptr;
  return spec.a_oblique.size() == 1 ? &spec.a_oblique[0]
                                    : &spec.a_oblique[static_cast<std::size_t>(q)];
}

Complex power_map(Complex z, double q, double eps) {
  const double m2 = std::norm(z) + eps * eps;
  return std::pow(m2, 0.5 * (q - 2.0)) * z;
}

}  // namespace

double oblique_form(const GridFunction& u, const OperatorSpec& spec, const Exponent& e,
                    double eps0, int padding_factor) {
  if (spec.kind != OperatorKind::Oblique) throw ConfigError("oblique form expects an oblique spec");
  if (u.dim_domain() != spec.n - 1) throw ConfigError("boundary grid dimension must be n-1");
  if (!spec.a_oblique.empty() && spec.a_oblique.size() > 1 &&
      static_cast<long>(spec.a_oblique.size()) != u.num_points()) {
    throw ConfigError("oblique coefficient field does not match the grid");
  }
  const long npts = u.num_points();
  const double eps = eps0 * u.max_abs();
  std::vector<Complex> fv(npts), gv(npts);
  for (long q = 0; q < npts; ++q) {
    const Complex z = u.value(0, q);
    if (e.p() >= 2.0) {
      fv[q] = z;
      gv[q] = power_map(z, e.p(), eps);
    } else {
      fv[q] = power_map(z, e.conjugate(), eps);
      gv[q] = z;
    }
  }
  GridFunction f(u.dim_domain(), 1, u.origin(), u.spacing(), u.extents(), u.support_margin(),
                 std::move(fv));
  GridFunction g(u.dim_domain(), 1, u.origin(), u.spacing(), u.extents(), u.support_margin(),
                 std::move(gv));

  const double lam = lambda_half_form(f, g, padding_factor);

  Kahan drift;
  std::vector<int> idx(u.dim_domain(), 0);
  for (long q = 0; q < npts; ++q) {
    const Eigen::VectorXcd* a = oblique_coeff_at(spec, q);
    if (!a) break;
    f.unflatten(q, idx.data());
    Complex sum(0, 0);
    for (int j = 0; j < u.dim_domain(); ++j) sum += (*a)[j] * f.diff(0, idx.data(), j);
    drift.add((sum * std::conj(g.value(0, q))).real());
  }
  return -lam + drift.sum * u.cell_volume();
}

double multiplier_norm_constant(const Eigen::VectorXcd& a) {
  return a.imag().norm();
}

double multiplier_norm_constant(const std::vector<Eigen::VectorXcd>& a_field) {
  if (a_field.empty()) return 0.0;
  if (a_field.size() > 1) {
    throw UnsupportedError("multiplier norms are computed for constant coefficients only");
  }
  return multiplier_norm_constant(a_field[0]);
}

namespace {

/// -div(Re a) samples on the boundary grid.
std::vector<double> drift_mass(const OperatorSpec& spec, long npts) {
  std::vector<double> m(npts, 0.0);
  if (spec.div_a_oblique.empty()) {
    if (!spec.a_oblique.empty() && spec.a_oblique.size() > 1) {
      throw ConfigError("sampled oblique coefficients require the divergence field div_a_oblique");
    }
    return m;  // constant coefficients: divergence zero
  }
  if (spec.div_a_oblique.size() == 1) {
    std::fill(m.begin(), m.end(), -spec.div_a_oblique[0].real());
    return m;
  }
  if (static_cast<long>(spec.div_a_oblique.size()) != npts) {
    throw ConfigError("div_a_oblique field does not match the grid");
  }
  for (long q = 0; q < npts; ++q) m[q] = -spec.div_a_oblique[q].real();
  return m;
}

GridFunction boundary_proto(const OperatorSpec& spec) {
  if (!spec.grid) throw ConfigError("oblique probe requires grid metadata in the spec");
  return GridFunction::zeros(spec.n - 1, 1, spec.grid->origin, spec.grid->spacing,
                             spec.grid->extents, 1);
}

}  // namespace

RayleighResult oblique_rayleigh_sup(const OperatorSpec& spec, const ObliqueProbeOptions& opts) {
  GridFunction proto = boundary_proto(spec);
  const long npts = proto.num_points();
  const std::vector<double> m = drift_mass(spec, npts);
  const PaddedBox box(proto, opts.padding_factor);

  // m embedded on the padded box.
  std::vector<double> mpad(box.total, 0.0);
  {
    std::vector<int> idx(box.d, 0);
    for (long q = 0; q < npts; ++q) {
      proto.unflatten(q, idx.data());
      long f = 0;
      for (int a = 0; a < box.d; ++a) f = f * box.dims[a] + idx[a];
      mpad[f] = m[q];
    }
  }
  double m_max = 0.0;
  for (double x : m) m_max = std::max(m_max, std::abs(x));
  double min_freq = std::numeric_limits<double>::infinity();
  for (int a = 0; a < box.d; ++a) {
    min_freq = std::min(min_freq, 2.0 * M_PI / (box.dims[a] * box.h));
  }
  const double shift = m_max / min_freq + 1.0;

  // S w = Lambda^{-1/2} (m . Lambda^{-1/2} w), mean mode projected out.
  auto half_inverse = [&](std::vector<Complex>& w) {
    dft(w, box.dims, FFTW_FORWARD);
    for (long k = 0; k < box.total; ++k) {
      const double f = box.freq_norm(k);
      w[k] = (f > 0.0) ? w[k] / std::sqrt(f) / static_cast<double>(box.total)
                       : Complex(0, 0);
    }
    dft(w, box.dims, FFTW_BACKWARD);
  };
  auto apply_s = [&](const std::vector<Complex>& w) {
    std::vector<Complex> t = w;
    half_inverse(t);
    for (long k = 0; k < box.total; ++k) t[k] *= mpad[k];
    half_inverse(t);
    return t;
  };

  // Deterministic start: the mass profile itself.
  std::vector<Complex> w(box.total, Complex(0, 0));
  for (long k = 0; k < box.total; ++k) w[k] = Complex(mpad[k] + 1e-3, 0.0);
  auto norm_of = [&](const std::vector<Complex>& x) {
    double s = 0.0;
    for (const Complex& z : x) s += std::norm(z);
    return std::sqrt(s);
  };
  double rho = 0.0;
  for (int it = 0; it < opts.power_iters; ++it) {
    std::vector<Complex> sw = apply_s(w);
    Complex dot(0, 0);
    double nw = 0.0;
    for (long k = 0; k < box.total; ++k) {
      dot += sw[k] * std::conj(w[k]);
      nw += std::norm(w[k]);
    }
    rho = dot.real() / nw;
    for (long k = 0; k < box.total; ++k) w[k] = sw[k] + shift * w[k];
    const double nn = norm_of(w);
    if (nn == 0.0) break;
    for (Complex& z : w) z /= nn;
  }

  RayleighResult out;
  out.ratio = rho;

  // Witness: v = Lambda^{-1/2} w windowed back onto the original box.
  std::vector<Complex> v = w;
  half_inverse(v);
  GridFunction cert = proto;
  {
    std::vector<int> idx(box.d, 0);
    for (long q = 0; q < npts; ++q) {
      cert.unflatten(q, idx.data());
      long f = 0;
      double window = 1.0;
      for (int a = 0; a < box.d; ++a) {
        f = f * box.dims[a] + idx[a];
        const double t = static_cast<double>(idx[a]) / (proto.extents()[a] - 1);
        window *= std::sin(M_PI * t) * std::sin(M_PI * t);
      }
      cert.set_value(0, q, window * v[f]);
    }
  }
  const double denom = lambda_half_form(cert, cert, opts.padding_factor);
  Kahan num;
  for (long q = 0; q < npts; ++q) num.add(m[q] * std::norm(cert.value(0, q)));
  out.certified_ratio = denom > 0.0 ? num.sum * cert.cell_volume() / denom : 0.0;
  out.v_star = std::move(cert);
  return out;
}

ObliqueCheck check_real_oblique(const OperatorSpec& spec, const Exponent& e,
                                const ObliqueProbeOptions& opts, const Tolerances& tol) {
  for (const auto& a : spec.a_oblique) {
    if (a.imag().cwiseAbs().maxCoeff() > tol.sym_detect) {
      throw DomainError("check_real_oblique requires real coefficients");
    }
  }
  ObliqueCheck out;
  out.verdict.criterion_id = "real-oblique";
  const double threshold = 4.0 / e.conjugate();  // p * 4/(pp')

  // Sign shortcut: div a <= 0 makes the trace inequality trivial.
  double m_max = -std::numeric_limits<double>::infinity();
  if (spec.div_a_oblique.empty()) {
    m_max = 0.0;  // constant coefficients
  } else {
    for (const auto& z : spec.div_a_oblique) m_max = std::max(m_max, -z.real());
  }
  if (m_max <= tol.eig) {
    out.verdict.status = Status::ProvenDissipative;
    out.verdict.margin = threshold;
    out.verdict.details["drift_mass_max"] = m_max;
    return out;
  }

  RayleighResult rr = oblique_rayleigh_sup(spec, opts);
  out.verdict.details["rayleigh_ratio"] = rr.ratio;
  out.verdict.details["certified_ratio"] = rr.certified_ratio;
  out.verdict.details["threshold"] = threshold;
  out.verdict.margin = threshold - std::max(rr.ratio, rr.certified_ratio);
  if (rr.certified_ratio > threshold * (1.0 + tol.form)) {
    out.verdict.status = Status::ProvenNotDissipative;
    Certificate c;
    c.kind = "rayleigh-witness";
    c.value = rr.certified_ratio;
    out.verdict.certificate = c;
    out.witness = rr.v_star;
  } else {
    out.verdict.status = Status::Indeterminate;
    out.verdict.details["necessary_holds"] = 1.0;
  }
  return out;
}

ObliqueCheck check_oblique(const OperatorSpec& spec, const Exponent& e,
                           const ObliqueProbeOptions& opts, const Tolerances& tol) {
  bool real_coeffs = true;
  for (const auto& a : spec.a_oblique) {
    if (a.imag().cwiseAbs().maxCoeff() > tol.sym_detect) real_coeffs = false;
  }
  if (real_coeffs) return check_real_oblique(spec, e, opts, tol);

  ObliqueCheck out;
  out.verdict.criterion_id = "oblique";
  const double norm = multiplier_norm_constant(spec.a_oblique);
  const double cpp = e.cpp();
  out.verdict.details["multiplier_norm"] = norm;
  out.verdict.details["smallness_margin"] = cpp - norm;

  double m_max = 0.0;
  for (const auto& z : spec.div_a_oblique) m_max = std::max(m_max, -z.real());
  const bool drift_trivial = spec.div_a_oblique.empty() || m_max <= tol.eig;

  if (norm < cpp - tol.eig && drift_trivial) {
    out.verdict.status = Status::SufficientHolds;
    out.verdict.margin = cpp - norm;
    return out;
  }
  if (!drift_trivial) {
    RayleighResult rr = oblique_rayleigh_sup(spec, opts);
    out.verdict.details["rayleigh_ratio"] = rr.ratio;
    out.verdict.details["certified_ratio"] = rr.certified_ratio;
    const double sufficient_cap = e.p() * (cpp - norm);
    const double necessary_cap = e.p() * (1.0 + norm);
    out.verdict.details["sufficient_cap"] = sufficient_cap;
    out.verdict.details["necessary_cap"] = necessary_cap;
    if (norm < cpp && rr.ratio <= sufficient_cap * (1.0 - tol.form)) {
      out.verdict.status = Status::SufficientHolds;
      out.verdict.margin = sufficient_cap - rr.ratio;
      return out;
    }
    if (rr.certified_ratio > necessary_cap * (1.0 + tol.form)) {
      out.verdict.status = Status::ProvenNotDissipative;
      out.verdict.margin = necessary_cap - rr.certified_ratio;
      Certificate c;
      c.kind = "rayleigh-witness";
      c.value = rr.certified_ratio;
      out.verdict.certificate = c;
      out.witness = rr.v_star;
      return out;
    }
  }
  // Gap between the sufficient and necessary constants: genuinely undecided.
  out.verdict.status = Status::Indeterminate;
  out.verdict.margin = cpp - norm;
  return out;
}

}  // namespace dissip
