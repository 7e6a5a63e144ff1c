#include "dissip/scalar_criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dissip/errors.hpp"

namespace dissip {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

struct EigenPair {
  double lambda_min;
  Eigen::VectorXd eigvec;
};

EigenPair min_eig(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  return {es.eigenvalues()[0], es.eigenvectors().col(0)};
}

Certificate eigen_certificate(const Eigen::VectorXd& v, double value) {
  Certificate c;
  c.kind = "eigenvector";
  c.xi = to_std(v);
  c.value = value;
  return c;
}

Certificate xi_eta_certificate(const Eigen::VectorXd& z, double value) {
  const Eigen::Index n = z.size() / 2;
  Certificate c;
  c.kind = "xi-eta";
  c.xi = to_std(z.head(n));
  c.eta = to_std(z.tail(n));
  c.value = value;
  return c;
}

Verdict classify_sector(double margin, const Eigen::VectorXd& witness, bool full_strength,
                        const std::string& id, const Tolerances& tol) {
  Verdict v;
  v.criterion_id = id;
  v.margin = margin;
  v.details["im_symmetric_and_no_lower_order"] = full_strength ? 1.0 : 0.0;
  const bool holds = margin >= -tol.eig;
  if (holds) {
    v.status = full_strength ? Status::ProvenDissipative : Status::Indeterminate;
    if (!full_strength) v.details["necessary_holds"] = 1.0;
  } else {
    v.status = full_strength ? Status::ProvenNotDissipative : Status::NecessaryFails;
    v.certificate = eigen_certificate(witness, margin);
  }
  return v;
}

}  // namespace

Verdict check_main_condition(const MatrixSample& A, const Exponent& e, bool lower_order_terms,
                             const Tolerances& tol) {
  const Eigen::MatrixXd& re = A.re_sym();
  double margin;
  Eigen::VectorXd witness;
  if (e.is_two()) {
    EigenPair p = min_eig(re);
    margin = p.lambda_min;
    witness = p.eigvec;
  } else {
    const double k = e.sector_ratio();
    EigenPair minus = min_eig(re - k * A.im_sym());
    EigenPair plus = min_eig(re + k * A.im_sym());
    if (minus.lambda_min <= plus.lambda_min) {
      margin = minus.lambda_min;
      witness = minus.eigvec;
    } else {
      margin = plus.lambda_min;
      witness = plus.eigvec;
    }
  }
  const bool full = A.im_symmetric() && !lower_order_terms;
  Verdict v = classify_sector(margin, witness, full, "main-condition", tol);
  return v;
}

Verdict check_quadratic_form_condition(const MatrixSample& A, const Exponent& e,
                                       bool lower_order_terms, const Tolerances& tol) {
  const Eigen::Index n = A.dim();
  const double w = e.skew_weight();
  Eigen::MatrixXd block(2 * n, 2 * n);
  block.topLeftCorner(n, n) = e.cpp() * A.re_sym();
  block.bottomRightCorner(n, n) = A.re_sym();
  block.topRightCorner(n, n) = -w * A.im_sym();
  block.bottomLeftCorner(n, n) = -w * A.im_sym();
  EigenPair p = min_eig(block);
  const bool full = A.im_symmetric() && !lower_order_terms;
  Verdict v = classify_sector(p.lambda_min, p.eigvec, full, "quadratic-form", tol);
  if (v.certificate) *v.certificate = xi_eta_certificate(p.eigvec, p.lambda_min);
  return v;
}

Verdict check_polynomial_condition(const ScalarPoint& pt, const Exponent& e,
                                   const PolynomialConditionParams& params,
                                   const Tolerances& tol) {
  const Eigen::Index n = pt.A.dim();
  const double w = e.skew_weight();
  const double p = e.p();
  const double pc = e.conjugate();

  // Quadratic part; the cross block is -(1-2/p) ImSym + ImSkew, i.e. the
  // mixed matrix Im A / p - (Im A)^t / p'.
  Eigen::MatrixXd cross = -w * pt.A.im_sym() + pt.A.im_skew();
  Eigen::MatrixXd quad(2 * n, 2 * n);
  quad.topLeftCorner(n, n) = e.cpp() * pt.A.re_sym();
  quad.bottomRightCorner(n, n) = pt.A.re_sym();
  quad.topRightCorner(n, n) = cross.transpose();
  quad.bottomLeftCorner(n, n) = cross;

  const bool have_b = pt.b.size() > 0 && pt.b.cwiseAbs().maxCoeff() != 0.0;
  const bool have_c = pt.c.size() > 0 && pt.c.cwiseAbs().maxCoeff() != 0.0;
  if ((have_b || have_c) && !pt.has_divergences) {
    throw ConfigError("polynomial condition requires div_b/div_c fields alongside b/c");
  }

  Eigen::VectorXd lin = Eigen::VectorXd::Zero(2 * n);
  if (pt.b.size() > 0) {
    lin.head(n) -= 2.0 * (params.alpha / p) * pt.b.real();
    lin.tail(n) += pt.b.imag();
  }
  if (pt.c.size() > 0) {
    lin.head(n) += 2.0 * (params.beta / pc) * pt.c.real();
    lin.tail(n) += pt.c.imag();
  }
  const double constant = ((1.0 - params.alpha) / p) * pt.div_b.real() -
                          ((1.0 - params.beta) / pc) * pt.div_c.real() - pt.a.real();

  Verdict v;
  v.criterion_id = "polynomial";
  v.details["alpha"] = params.alpha;
  v.details["beta"] = params.beta;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(quad);
  const Eigen::VectorXd evals = es.eigenvalues();
  const double lambda_min = evals[0];
  const double lambda_max = evals[evals.size() - 1];
  const double scale = std::max({1.0, std::abs(lambda_max), lin.cwiseAbs().maxCoeff(),
                                 std::abs(constant)});
  const double kernel_tol = tol.eig * std::max(1.0, std::abs(lambda_max));
  v.details["lambda_min"] = lambda_min;

  auto evaluate = [&](const Eigen::VectorXd& z) {
    return z.dot(quad * z) + lin.dot(z) + constant;
  };
  auto indeterminate_with = [&](const Eigen::VectorXd& z) {
    v.status = Status::Indeterminate;
    const double val = evaluate(z);
    v.certificate = xi_eta_certificate(z, val);
    v.margin = val;
    return v;
  };

  if (lambda_min < -tol.eig) {
    // Indefinite quadratic part: walk the negative eigendirection far enough
    // to exhibit a negative value.
    Eigen::VectorXd dir = es.eigenvectors().col(0);
    const double lv = lin.dot(dir);
    if (lv > 0) dir = -dir;
    const double a2 = lambda_min;
    const double t = (std::abs(lv) + std::sqrt(lv * lv + 4.0 * std::abs(a2) * (std::abs(constant) + 1.0))) /
                     (2.0 * std::abs(a2));
    return indeterminate_with(t * dir);
  }

  // PSD (up to slack): split the linear term across kernel and range.
  Eigen::VectorXd kernel_component = Eigen::VectorXd::Zero(2 * n);
  Eigen::VectorXd pinv_l = Eigen::VectorXd::Zero(2 * n);
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    const Eigen::VectorXd q = es.eigenvectors().col(i);
    const double coef = q.dot(lin);
    if (evals[i] <= kernel_tol) {
      kernel_component += coef * q;
    } else {
      pinv_l += (coef / evals[i]) * q;
    }
  }
  const double kernel_norm = kernel_component.norm();
  if (kernel_norm > tol.eig * (1.0 + lin.norm())) {
    // Linear term survives on the kernel: unbounded below along it.
    Eigen::VectorXd dir = -kernel_component / kernel_norm;
    const double lv = lin.dot(dir);  // negative by construction
    const double t = (2.0 + std::abs(constant)) / std::max(-lv, 1e-300);
    return indeterminate_with(t * dir);
  }

  const double fmin = constant - 0.25 * lin.dot(pinv_l);
  v.margin = fmin;
  v.details["minimum_value"] = fmin;
  if (fmin >= -tol.form_at(scale)) {
    v.status = Status::SufficientHolds;
  } else {
    v.status = Status::Indeterminate;
    v.certificate = xi_eta_certificate(-0.5 * pinv_l, fmin);
  }
  return v;
}

Verdict check_polynomial_best_effort(const ScalarPoint& pt, const Exponent& e,
                                     const Tolerances& tol, int grid_per_axis, double range) {
  if (grid_per_axis < 1) throw ConfigError("alpha/beta grid must have >= 1 node per axis");
  Verdict best;
  bool first = true;
  for (int i = 0; i < grid_per_axis; ++i) {
    for (int j = 0; j < grid_per_axis; ++j) {
      PolynomialConditionParams params;
      params.alpha = grid_per_axis == 1 ? 0.0 : -range + 2.0 * range * i / (grid_per_axis - 1);
      params.beta = grid_per_axis == 1 ? 0.0 : -range + 2.0 * range * j / (grid_per_axis - 1);
      Verdict v = check_polynomial_condition(pt, e, params, tol);
      if (v.status == Status::SufficientHolds) return v;
      if (first || v.margin > best.margin) {
        best = v;
        first = false;
      }
    }
  }
  return best;
}

Verdict check_constant_coefficients(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                                    std::complex<double> a, const Exponent& e,
                                    const Tolerances& tol) {
  if (A.rows() != A.cols()) throw DomainError("A must be square");
  if (b.size() != A.rows()) throw DomainError("b length must match A");
  const Eigen::MatrixXcd sym = 0.5 * (A + A.transpose());
  const MatrixSample sample = decompose_matrix(sym, tol);
  const Eigen::MatrixXd re = sample.re_sym();
  const Eigen::VectorXd im_b = b.imag();
  const Eigen::Index n = A.rows();

  Verdict v;
  v.criterion_id = "constant-coefficients";

  // Least-squares solve of 2 Re(A) V = -Im b.  <Re(A) V, V> is constant on
  // the whole affine solution set (the kernel of Re(A) is orthogonal to the
  // range), so the least-squares point realizes the infimum whenever the
  // system is solvable.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re);
  const Eigen::VectorXd evals = es.eigenvalues();
  const double lambda_max_abs = evals.cwiseAbs().maxCoeff();
  const double rank_tol = tol.eig * std::max(1.0, lambda_max_abs);
  Eigen::VectorXd V = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(evals[i]) <= rank_tol) continue;
    const Eigen::VectorXd q = es.eigenvectors().col(i);
    V += (q.dot(-im_b) / (2.0 * evals[i])) * q;
  }
  const double residual = (2.0 * re * V + im_b).norm();
  v.details["solve_residual"] = residual;
  const bool solvable = residual <= tol.eig * (1.0 + im_b.norm());

  const double zeroth = a.real() + V.dot(re * V);
  const double zeroth_scale = std::max({1.0, std::abs(a.real()), V.dot(re * V)});
  const double zeroth_margin = -zeroth;
  v.details["zeroth_margin"] = zeroth_margin;
  const bool zeroth_ok = zeroth <= tol.form_at(zeroth_scale);

  Verdict sector = check_main_condition(sample, e, false, tol);
  v.details["v1_margin"] = sector.margin;
  const bool sector_ok = sector.margin >= -tol.eig;

  // Inverse-based corollary route, evaluated for agreement when Re(A) is
  // nonsingular.
  const bool invertible = evals.cwiseAbs().minCoeff() > rank_tol;
  if (invertible) {
    const Eigen::VectorXd solved = es.eigenvectors() *
                                   (es.eigenvectors().transpose() * im_b).cwiseQuotient(evals);
    const double corollary_margin = -(4.0 * a.real() + im_b.dot(solved)) / 4.0;
    v.details["corollary_margin"] = corollary_margin;
    const bool corollary_ok = corollary_margin >= -tol.form_at(zeroth_scale);
    v.details["corollary_agrees"] = (corollary_ok == (solvable && zeroth_ok)) ? 1.0 : 0.0;
  }

  if (!solvable) {
    v.status = Status::ProvenNotDissipative;
    v.margin = -residual;
    Certificate c;
    c.kind = "residual";
    c.xi = to_std(V);
    c.value = residual;
    v.certificate = c;
    return v;
  }
  if (!zeroth_ok) {
    v.status = Status::ProvenNotDissipative;
    v.margin = zeroth_margin;
    Certificate c;
    c.kind = "vector";
    c.xi = to_std(V);
    c.value = zeroth;
    v.certificate = c;
    return v;
  }
  if (!sector_ok) {
    v.status = Status::ProvenNotDissipative;
    v.margin = sector.margin;
    v.certificate = sector.certificate;
    return v;
  }
  v.status = Status::ProvenDissipative;
  v.margin = std::min(zeroth_margin, sector.margin);
  Certificate c;
  c.kind = "vector";
  c.xi = to_std(V);
  c.value = zeroth;
  v.certificate = c;
  return v;
}

Verdict check_necessary_repart(const MatrixSample& A, const Tolerances& tol) {
  EigenPair p = min_eig(A.re_sym());
  Verdict v;
  v.criterion_id = "necessary-re-part";
  v.margin = p.lambda_min;
  if (p.lambda_min >= -tol.eig) {
    v.status = Status::Indeterminate;
    v.details["necessary_holds"] = 1.0;
  } else {
    v.status = Status::NecessaryFails;
    v.certificate = eigen_certificate(p.eigvec, p.lambda_min);
  }
  return v;
}

ScalarPoint scalar_point_at(const OperatorSpec& spec, long i, const Tolerances& tol) {
  auto pick_matrix = [&](const std::vector<Eigen::MatrixXcd>& f) -> Eigen::MatrixXcd {
    if (f.empty()) return Eigen::MatrixXcd::Zero(spec.n, spec.n);
    return f.size() == 1 ? f[0] : f.at(static_cast<std::size_t>(i));
  };
  auto pick_vector = [&](const std::vector<Eigen::VectorXcd>& f) -> Eigen::VectorXcd {
    if (f.empty()) return Eigen::VectorXcd();
    return f.size() == 1 ? f[0] : f.at(static_cast<std::size_t>(i));
  };
  auto pick_scalar = [&](const std::vector<std::complex<double>>& f) -> std::complex<double> {
    if (f.empty()) return {0.0, 0.0};
    return f.size() == 1 ? f[0] : f.at(static_cast<std::size_t>(i));
  };
  ScalarPoint pt;
  pt.A = decompose_matrix(pick_matrix(spec.A), tol);
  pt.b = pick_vector(spec.b);
  pt.c = pick_vector(spec.c);
  pt.a = pick_scalar(spec.a);
  const bool need_div_b = !spec.b.empty();
  const bool need_div_c = !spec.c.empty();
  pt.has_divergences = (!need_div_b || !spec.div_b.empty()) && (!need_div_c || !spec.div_c.empty());
  if (spec.coefficient_class == CoefficientClass::Constant) {
    // Constant coefficients have vanishing divergences unless stated.
    if (need_div_b && spec.div_b.empty()) pt.div_b = 0.0;
    if (need_div_c && spec.div_c.empty()) pt.div_c = 0.0;
    pt.has_divergences = true;
  }
  if (!spec.div_b.empty()) pt.div_b = pick_scalar(spec.div_b);
  if (!spec.div_c.empty()) pt.div_c = pick_scalar(spec.div_c);
  return pt;
}

Verdict check_field(const OperatorSpec& spec, const Exponent& e, const std::string& criterion,
                    const PolynomialConditionParams& params, const Tolerances& tol) {
  if (spec.kind != OperatorKind::Scalar) throw ConfigError("check_field expects a scalar spec");
  const long count = spec.sample_count();
  if (count < 1) throw ConfigError("scalar spec carries no coefficient samples");
  const bool lower = spec.has_lower_order_terms();

  auto weakness = [](Status s) {
    switch (s) {
      case Status::ProvenDissipative: return 0;
      case Status::SufficientHolds: return 1;
      default: return 2;
    }
  };

  Verdict aggregate;
  bool first = true;
  bool have_fail = false;
  int worst_weakness = 0;
  long worst_sample = 0;
  for (long i = 0; i < count; ++i) {
    ScalarPoint pt = scalar_point_at(spec, i, tol);
    Verdict v;
    if (criterion == "main") {
      v = check_main_condition(pt.A, e, lower, tol);
    } else if (criterion == "quadform") {
      v = check_quadratic_form_condition(pt.A, e, lower, tol);
    } else if (criterion == "repart") {
      v = check_necessary_repart(pt.A, tol);
    } else if (criterion == "polynomial") {
      v = check_polynomial_condition(pt, e, params, tol);
    } else {
      throw ConfigError("unknown pointwise criterion '" + criterion + "'");
    }
    if (v.certificate) v.certificate->sample_index = static_cast<int>(i);
    worst_weakness = std::max(worst_weakness, weakness(v.status));
    const bool take = first || (v.fails() && !have_fail) ||
                      (v.fails() == have_fail && v.margin < aggregate.margin);
    if (take) {
      aggregate = v;
      worst_sample = i;
      have_fail = v.fails();
      first = false;
    }
  }
  aggregate.details["worst_sample"] = static_cast<double>(worst_sample);
  if (!have_fail) {
    if (worst_weakness == 2) {
      aggregate.status = Status::Indeterminate;
    } else if (worst_weakness == 1 && aggregate.status == Status::ProvenDissipative) {
      aggregate.status = Status::SufficientHolds;
    }
  }
  aggregate.criterion_id += "-field";
  return aggregate;
}

}  // namespace dissip
