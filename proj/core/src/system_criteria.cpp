#include "dissip/system_criteria.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dissip/errors.hpp"

namespace dissip {

namespace {

std::vector<double> stack_complex(const Eigen::VectorXcd& z) {
  std::vector<double> out;
  out.reserve(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(z[i].real());
  for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(z[i].imag());
  return out;
}

Eigen::MatrixXcd pick(const std::vector<Eigen::MatrixXcd>& field, long i, int m) {
  if (field.empty()) return Eigen::MatrixXcd::Zero(m, m);
  return field.size() == 1 ? field[0] : field.at(static_cast<std::size_t>(i));
}

double matrix_scale(const Eigen::MatrixXcd& m) {
  return std::max(1.0, m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff());
}

/// Largest deviation of B from b I with b real (p != 2 structure test).
double scalar_identity_violation(const Eigen::MatrixXcd& B) {
  double v = 0.0;
  const Eigen::Index m = B.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j) v = std::max(v, std::abs(B(i, j)));
    }
    v = std::max(v, std::abs(B(i, i).imag()));
    v = std::max(v, std::abs(B(i, i) - B(0, 0)));
  }
  return v;
}

double hermitian_violation(const Eigen::MatrixXcd& B) {
  return (B - B.adjoint()).cwiseAbs().maxCoeff();
}

struct SpectralResult {
  double lambda_min;
  Eigen::VectorXcd zeta;
};

SpectralResult hermitian_part_min_eig(const Eigen::MatrixXcd& M) {
  const Eigen::MatrixXcd herm = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  return {es.eigenvalues()[0], es.eigenvectors().col(0)};
}

Verdict first_order_impl(const OperatorSpec& spec, const Exponent& e, const Tolerances& tol,
                         bool general) {
  if (spec.kind != OperatorKind::SystemFirstOrder) {
    throw ConfigError("first-order check expects a system-first-order spec");
  }
  if (!spec.Bh.empty() && spec.dB.empty()) {
    throw ConfigError("first-order check requires the divergence field dB");
  }
  if (general && !spec.Ch.empty() && spec.dC.empty()) {
    throw ConfigError("general first-order check requires the divergence field dC");
  }
  if (!general && !spec.Ch.empty()) {
    throw ConfigError("spec carries C^h fields; use the general first-order check");
  }
  const long count = std::max<long>(1, spec.sample_count());
  const int m = spec.m;

  Verdict v;
  v.criterion_id = general ? "first-order-general" : "first-order";
  double worst_margin = std::numeric_limits<double>::infinity();
  bool failed = false;

  for (long i = 0; i < count; ++i) {
    // Structure of B^h (+ C^h).
    for (int h = 0; h < spec.n; ++h) {
      Eigen::MatrixXcd B = spec.Bh.empty() ? Eigen::MatrixXcd::Zero(m, m) : pick(spec.Bh[h], i, m);
      if (general && !spec.Ch.empty()) B += pick(spec.Ch[h], i, m);
      const double scale = matrix_scale(B);
      const double viol = e.is_two() ? hermitian_violation(B) : scalar_identity_violation(B);
      if (viol > tol.eig * scale) {
        v.status = Status::ProvenNotDissipative;
        v.margin = -viol;
        Certificate c;
        c.kind = e.is_two() ? "structure-hermitian" : "structure-scalar-identity";
        c.sample_index = static_cast<int>(i);
        c.direction = h;
        c.value = viol;
        v.certificate = c;
        v.details["structure_violation"] = viol;
        return v;
      }
    }
    // Spectral condition.
    Eigen::MatrixXcd M = pick(spec.dB, i, m) / e.p();
    if (general && !spec.dC.empty()) M -= pick(spec.dC, i, m) / e.conjugate();
    M -= pick(spec.D, i, m);
    SpectralResult sr = hermitian_part_min_eig(M);
    if (sr.lambda_min < worst_margin) {
      worst_margin = sr.lambda_min;
      if (sr.lambda_min < -tol.eig) {
        failed = true;
        Certificate c;
        c.kind = "zeta";
        c.xi = stack_complex(sr.zeta);
        c.sample_index = static_cast<int>(i);
        c.value = sr.lambda_min;
        v.certificate = c;
      }
    }
  }
  v.margin = worst_margin;
  v.status = failed ? Status::ProvenNotDissipative : Status::ProvenDissipative;
  return v;
}

}  // namespace

Verdict check_first_order(const OperatorSpec& spec, const Exponent& e, const Tolerances& tol) {
  return first_order_impl(spec, e, tol, false);
}

Verdict check_first_order_general(const OperatorSpec& spec, const Exponent& e,
                                  const Tolerances& tol) {
  return first_order_impl(spec, e, tol, true);
}

double second_order_form(const Eigen::MatrixXcd& Ah, const Exponent& e,
                         const Eigen::VectorXcd& lambda, const Eigen::VectorXcd& omega) {
  // <x, y> = sum_j x_j conj(y_j); Eigen's y.dot(x).
  const double re_a_ll = lambda.dot(Ah * lambda).real();
  const double re_a_ww = omega.dot(Ah * omega).real();
  const double re_lw = omega.dot(lambda).real();
  const std::complex<double> cross = lambda.dot(Ah * omega) - omega.dot(Ah * lambda);
  return re_a_ll - e.cp() * re_a_ww * re_lw * re_lw - e.skew_weight() * cross.real() * re_lw;
}

namespace {

struct SpherePoint {
  Eigen::VectorXcd lambda, omega;
  double value = 0.0;
};

Eigen::VectorXcd random_unit(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd z(m);
  for (int i = 0; i < m; ++i) z[i] = std::complex<double>(gauss(rng), gauss(rng));
  const double n = z.norm();
  return n > 0 ? Eigen::VectorXcd(z / n) : Eigen::VectorXcd::Unit(m, 0);
}

/// The form is invariant under a simultaneous phase rotation of lambda and
/// omega; rotating omega's largest component to the positive real axis
/// removes the flat direction from the search.
void fix_phase(Eigen::VectorXcd& lambda, Eigen::VectorXcd& omega) {
  Eigen::Index imax = 0;
  omega.cwiseAbs().maxCoeff(&imax);
  const std::complex<double> w = omega[imax];
  if (std::abs(w) == 0.0) return;
  const std::complex<double> phase = std::conj(w) / std::abs(w);
  lambda *= phase;
  omega *= phase;
}

SpherePoint minimize_form(const Eigen::MatrixXcd& Ah, const Exponent& e,
                          const SphereSearchConfig& cfg, std::uint64_t stream) {
  const int m = static_cast<int>(Ah.rows());
  std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  auto eval = [&](const Eigen::VectorXcd& l, const Eigen::VectorXcd& w) {
    return second_order_form(Ah, e, l, w);
  };

  std::vector<SpherePoint> pool;
  pool.reserve(cfg.coarse_samples);
  for (int i = 0; i < cfg.coarse_samples; ++i) {
    SpherePoint p;
    p.lambda = random_unit(rng, m);
    p.omega = random_unit(rng, m);
    fix_phase(p.lambda, p.omega);
    p.value = eval(p.lambda, p.omega);
    pool.push_back(std::move(p));
  }
  std::sort(pool.begin(), pool.end(),
            [](const SpherePoint& a, const SpherePoint& b) { return a.value < b.value; });
  const int starts = std::min<int>(cfg.restarts, static_cast<int>(pool.size()));

  std::normal_distribution<double> gauss(0.0, 1.0);
  SpherePoint best = pool.front();
  for (int s = 0; s < starts; ++s) {
    SpherePoint cur = pool[s];
    double step = 0.3;
    for (int it = 0; it < cfg.refine_iters; ++it) {
      Eigen::VectorXcd dl(m), dw(m);
      for (int i = 0; i < m; ++i) {
        dl[i] = std::complex<double>(gauss(rng), gauss(rng));
        dw[i] = std::complex<double>(gauss(rng), gauss(rng));
      }
      Eigen::VectorXcd l = cur.lambda + step * dl;
      Eigen::VectorXcd w = cur.omega + step * dw;
      l /= l.norm();
      w /= w.norm();
      fix_phase(l, w);
      const double val = eval(l, w);
      if (val < cur.value) {
        cur.lambda = std::move(l);
        cur.omega = std::move(w);
        cur.value = val;
        step = std::min(0.5, step * 1.3);
      } else {
        step = std::max(1e-6, step * 0.7);
      }
    }
    if (cur.value < best.value) best = cur;
  }
  return best;
}

}  // namespace

Verdict check_second_order_system(const OperatorSpec& spec, const Exponent& e,
                                  const SphereSearchConfig& cfg, const Tolerances& tol) {
  if (spec.Ah.empty()) throw ConfigError("second-order check requires the A^h fields");
  if (cfg.coarse_samples < 64) throw ConfigError("sphere search needs coarse_samples >= 64");
  if (cfg.refine_iters < 0 || cfg.restarts < 1) throw ConfigError("invalid sphere search budget");
  const long count = std::max<long>(1, spec.sample_count());
  const int m = spec.m;

  Verdict v;
  v.criterion_id = "second-order-system";
  double worst = std::numeric_limits<double>::infinity();
  double worst_scale = 1.0;

  for (long i = 0; i < count; ++i) {
    for (std::size_t h = 0; h < spec.Ah.size(); ++h) {
      const Eigen::MatrixXcd Ah = pick(spec.Ah[h], i, m);
      SpherePoint p = minimize_form(Ah, e, cfg, static_cast<std::uint64_t>(i) * spec.Ah.size() + h);
      if (p.value < worst) {
        worst = p.value;
        worst_scale = matrix_scale(Ah);
        Certificate c;
        c.kind = "lambda-omega";
        c.xi = stack_complex(p.lambda);
        c.eta = stack_complex(p.omega);
        c.sample_index = static_cast<int>(i);
        c.direction = static_cast<int>(h);
        c.value = p.value;
        v.certificate = c;
      }
    }
  }
  v.margin = worst;
  const double slack = tol.form_at(worst_scale);
  if (worst >= -slack) {
    v.status = Status::ProvenDissipative;
    v.certificate.reset();
  } else if (worst < -10.0 * slack) {
    v.status = Status::ProvenNotDissipative;
  } else {
    v.status = Status::Indeterminate;
  }
  return v;
}

Verdict check_combined_second_order(const OperatorSpec& spec, const Exponent& e,
                                    const SphereSearchConfig& cfg, const Tolerances& tol) {
  Verdict principal = check_second_order_system(spec, e, cfg, tol);

  Verdict first;
  if (spec.Bh.empty() && spec.D.empty()) {
    first.status = Status::ProvenDissipative;
    first.margin = 0.0;
    first.criterion_id = "first-order";
  } else {
    OperatorSpec lower = spec;
    lower.kind = OperatorKind::SystemFirstOrder;
    lower.Ah.clear();
    first = check_first_order(lower, e, tol);
  }

  Verdict v;
  v.criterion_id = "combined-second-order";
  v.details["principal_margin"] = principal.margin;
  v.details["first_order_margin"] = first.margin;
  if (principal.status == Status::ProvenDissipative && first.status == Status::ProvenDissipative) {
    v.status = Status::SufficientHolds;
    v.margin = std::min(principal.margin, first.margin);
  } else {
    // The combined theorem is sufficient-only: a failing component is not a
    // disproof of the full operator.
    v.status = Status::Indeterminate;
    const Verdict& bad = principal.status != Status::ProvenDissipative ? principal : first;
    v.margin = bad.margin;
    v.certificate = bad.certificate;
  }
  return v;
}

}  // namespace dissip
