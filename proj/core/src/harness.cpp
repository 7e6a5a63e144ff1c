#include "dissip/harness.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <ostream>
#include <sstream>

#include "dissip/elasticity.hpp"
#include "dissip/errors.hpp"
#include "dissip/lame_probe.hpp"
#include "dissip/nonlocal.hpp"
#include "dissip/oblique.hpp"

namespace dissip {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string agreement_of(const Verdict& v, double probe_value, const Tolerances& tol) {
  const double threshold = -10.0 * tol.form_at(1.0);
  const bool probe_negative = probe_value < threshold;
  if (v.holds()) return probe_negative ? "conflict" : "consistent";
  if (v.fails()) return probe_negative ? "consistent-counterexample" : "unconfirmed";
  return probe_negative ? "counterexample-beyond-criterion" : "open";
}

std::string certificate_ref(const Verdict& v) {
  if (!v.certificate) return "";
  std::ostringstream os;
  os << v.certificate->kind;
  if (v.certificate->sample_index >= 0) os << "@" << v.certificate->sample_index;
  if (v.certificate->direction >= 0) os << "#" << v.certificate->direction;
  return os.str();
}

}  // namespace

Json RunReport::to_json() const {
  Json j;
  j["spec_id"] = spec_id;
  j["p"] = p;
  Json arr = Json::array();
  for (const CriterionOutcome& o : outcomes) {
    Json e;
    e["verdict"] = verdict_to_json(o.verdict);
    e["millis"] = o.millis;
    if (!o.oracle_agreement.empty()) e["oracle_agreement"] = o.oracle_agreement;
    arr.push_back(std::move(e));
  }
  j["criteria"] = std::move(arr);
  if (probe) {
    Json pj;
    pj["value"] = probe->value;
    pj["converged"] = probe->converged;
    pj["evaluations"] = probe->evaluations;
    j["probe"] = std::move(pj);
  } else {
    j["probe"] = nullptr;
  }
  j["total_millis"] = total_millis;
  j["exit_code"] = exit_code();
  return j;
}

int RunReport::exit_code() const {
  bool indet = false;
  for (const CriterionOutcome& o : outcomes) {
    if (o.verdict.fails()) return 1;
    if (o.verdict.status == Status::Indeterminate) indet = true;
  }
  return indet ? 2 : 0;
}

void RunReport::csv_header(std::ostream& os) {
  os << "spec_id,p,criterion,status,margin,certificate_ref\n";
}

void RunReport::append_csv(std::ostream& os) const {
  for (const CriterionOutcome& o : outcomes) {
    os << spec_id << "," << p << "," << o.verdict.criterion_id << ","
       << to_string(o.verdict.status) << "," << o.verdict.margin << ","
       << certificate_ref(o.verdict) << "\n";
  }
}

namespace {

void run_scalar(const OperatorSpec& spec, const Exponent& e, const RunOptions& opts,
                RunReport& report) {
  auto add = [&](const char* name, auto&& fn) {
    if (opts.criterion != "all" && opts.criterion != name) return;
    CriterionOutcome o;
    const double t0 = now_ms();
    o.verdict = fn();
    o.millis = now_ms() - t0;
    report.outcomes.push_back(std::move(o));
  };
  add("repart", [&] { return check_field(spec, e, "repart", opts.poly, opts.tol); });
  add("main", [&] { return check_field(spec, e, "main", opts.poly, opts.tol); });
  add("quadform", [&] { return check_field(spec, e, "quadform", opts.poly, opts.tol); });
  add("polynomial", [&] {
    if (opts.poly_best_effort && spec.sample_count() == 1) {
      return check_polynomial_best_effort(scalar_point_at(spec, 0, opts.tol), e, opts.tol);
    }
    return check_field(spec, e, "polynomial", opts.poly, opts.tol);
  });
  if (spec.coefficient_class == CoefficientClass::Constant) {
    add("constant", [&] {
      const Eigen::MatrixXcd A =
          spec.A.empty() ? Eigen::MatrixXcd::Zero(spec.n, spec.n) : spec.A[0];
      const Eigen::VectorXcd b = spec.b.empty() ? Eigen::VectorXcd::Zero(spec.n) : spec.b[0];
      const std::complex<double> a = spec.a.empty() ? std::complex<double>(0, 0) : spec.a[0];
      return check_constant_coefficients(A, b, a, e, opts.tol);
    });
  }
}

void run_elasticity(const OperatorSpec& spec, const Exponent& e, const RunOptions& opts,
                    RunReport& report) {
  auto add = [&](const char* name, auto&& fn) {
    if (opts.criterion != "all" && opts.criterion != name) return;
    CriterionOutcome o;
    const double t0 = now_ms();
    o.verdict = fn();
    o.millis = now_ms() - t0;
    report.outcomes.push_back(std::move(o));
  };
  if (spec.nu.size() == 1) {
    if (spec.n == 2) add("planar", [&] { return elasticity_planar(spec.nu[0], e, opts.tol); });
    add("ndim", [&] { return elasticity_ndim_sufficient(spec.nu[0], e, opts.tol); });
  } else {
    add("necessary-variable-nu",
        [&] { return elasticity_necessary_variable_nu(spec.nu, e, 1e-8, opts.tol); });
  }
}

void run_system(const OperatorSpec& spec, const Exponent& e, const RunOptions& opts,
                RunReport& report) {
  auto add = [&](const char* name, auto&& fn) {
    if (opts.criterion != "all" && opts.criterion != name) return;
    CriterionOutcome o;
    const double t0 = now_ms();
    o.verdict = fn();
    o.millis = now_ms() - t0;
    report.outcomes.push_back(std::move(o));
  };
  if (spec.kind == OperatorKind::SystemFirstOrder) {
    if (spec.Ch.empty()) {
      add("first-order", [&] { return check_first_order(spec, e, opts.tol); });
    } else {
      add("first-order-general", [&] { return check_first_order_general(spec, e, opts.tol); });
    }
  } else {
    add("second-order", [&] { return check_second_order_system(spec, e, opts.sphere, opts.tol); });
    if (!spec.Bh.empty() || !spec.D.empty()) {
      add("combined", [&] { return check_combined_second_order(spec, e, opts.sphere, opts.tol); });
    }
  }
}

void run_nonlocal(const OperatorSpec& spec, const Exponent& e, const RunOptions& opts,
                  RunReport& report) {
  CriterionOutcome o;
  const double t0 = now_ms();
  // Positivity validated on a reference bump.
  const int npts = 65;
  Eigen::VectorXd origin = Eigen::VectorXd::Constant(1, -1.0);
  GridFunction bump = GridFunction::sample(
      1, 1, origin, 2.0 / (npts - 1), {npts}, 1, [](const Eigen::VectorXd& x, int) {
        const double t = x[0];
        return std::abs(t) < 0.9 ? Complex(std::pow(std::cos(M_PI * t / 1.8), 2.0), 0.0)
                                 : Complex(0, 0);
      });
  KernelSpec k = *spec.kernel;
  k.dimension = 1;
  const PositivityReport pr = check_positivity_bound(bump, e, k, opts.tol);
  Verdict v;
  v.criterion_id = "nonlocal-positivity";
  v.margin = pr.margin;
  v.details["lhs"] = pr.lhs;
  v.details["rhs_half"] = pr.rhs_half;
  v.details["besov_bound"] = pr.besov_bound;
  v.status = pr.half_bound_holds ? Status::ProvenDissipative : Status::Indeterminate;
  o.verdict = std::move(v);
  o.millis = now_ms() - t0;
  report.outcomes.push_back(std::move(o));
}

}  // namespace

RunReport run_spec(const OperatorSpec& spec, const Exponent& e, const RunOptions& opts) {
  spec.validate();
  RunReport report;
  report.spec_id = spec.id.empty() ? to_string(spec.kind) : spec.id;
  report.p = e.p();
  const double t0 = now_ms();

  switch (spec.kind) {
    case OperatorKind::Scalar:
      run_scalar(spec, e, opts, report);
      break;
    case OperatorKind::Elasticity:
      run_elasticity(spec, e, opts, report);
      break;
    case OperatorKind::SystemFirstOrder:
    case OperatorKind::SystemSecondOrder:
      run_system(spec, e, opts, report);
      break;
    case OperatorKind::Oblique: {
      CriterionOutcome o;
      const double t1 = now_ms();
      o.verdict = check_oblique(spec, e, {}, opts.tol).verdict;
      o.millis = now_ms() - t1;
      report.outcomes.push_back(std::move(o));
      break;
    }
    case OperatorKind::Nonlocal:
      run_nonlocal(spec, e, opts, report);
      break;
  }

  if (opts.with_probe && spec.kind == OperatorKind::Scalar) {
    SearchOptions popts = opts.probe;
    popts.threads = opts.threads;
    ProbeResult pr = search_counterexample(spec, e, popts);
    report.probe = ProbeSummary{pr.value, pr.converged, pr.evaluations};
    for (CriterionOutcome& o : report.outcomes) {
      o.oracle_agreement = agreement_of(o.verdict, pr.value, opts.tol);
    }
  } else if (opts.with_probe && spec.kind == OperatorKind::Elasticity && spec.nu.size() == 1 &&
             spec.n == 2) {
    LameSearchOptions lopts;
    ProbeResult pr = lame_counterexample_search(spec.nu[0], e, lopts);
    // Sign convention: dissipative means <= 0, so a positive value is the
    // counterexample; report the negated value to keep the probe summary
    // uniform ("negative value = counterexample found").
    report.probe = ProbeSummary{-pr.value, pr.converged, pr.evaluations};
    for (CriterionOutcome& o : report.outcomes) {
      o.oracle_agreement = agreement_of(o.verdict, -pr.value, opts.tol);
    }
  }

  report.total_millis = now_ms() - t0;
  return report;
}

RunReport run_spec_file(const std::string& path, const Exponent& e, const RunOptions& opts) {
  return run_spec(load_spec(path), e, opts);
}

std::vector<double> SweepRange::values() const {
  std::vector<double> out;
  if (step <= 0.0) throw ConfigError("sweep step must be positive");
  for (double x = lo; x <= hi + 1e-12 * std::max(1.0, std::abs(hi)); x += step) out.push_back(x);
  if (out.empty()) throw ConfigError("empty sweep range for '" + name + "'");
  return out;
}

std::vector<SweepRange> parse_sweep_spec(const std::string& text) {
  std::vector<SweepRange> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("sweep clause '" + part + "' lacks '='");
    SweepRange r;
    r.name = part.substr(0, eq);
    const std::string spec = part.substr(eq + 1);
    std::stringstream cs(spec);
    std::string tok;
    std::vector<double> nums;
    while (std::getline(cs, tok, ':')) nums.push_back(std::stod(tok));
    if (nums.size() == 1) {
      r.lo = r.hi = nums[0];
      r.step = 1.0;
    } else if (nums.size() == 3) {
      r.lo = nums[0];
      r.hi = nums[1];
      r.step = nums[2];
    } else {
      throw ConfigError("sweep clause '" + part + "' must be name=value or name=lo:hi:step");
    }
    r.values();  // validates the range eagerly
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ConfigError("empty sweep specification");
  return out;
}

Json substitute_params(const Json& templ, const std::map<std::string, double>& bindings) {
  if (templ.is_string()) {
    const std::string s = templ.get<std::string>();
    if (!s.empty() && s[0] == '$') {
      const auto it = bindings.find(s.substr(1));
      if (it == bindings.end()) throw ConfigError("unbound template parameter '" + s + "'");
      return Json(it->second);
    }
    return templ;
  }
  if (templ.is_array()) {
    Json out = Json::array();
    for (const Json& x : templ) out.push_back(substitute_params(x, bindings));
    return out;
  }
  if (templ.is_object()) {
    Json out = Json::object();
    for (auto it = templ.begin(); it != templ.end(); ++it) {
      out[it.key()] = substitute_params(it.value(), bindings);
    }
    return out;
  }
  return templ;
}

void spec_sweep_csv(std::ostream& os, const Json& templ, const std::vector<SweepRange>& ranges,
                    double default_p, const RunOptions& opts) {
  std::vector<std::vector<double>> grids;
  grids.reserve(ranges.size());
  long total = 1;
  for (const SweepRange& r : ranges) {
    grids.push_back(r.values());
    total *= static_cast<long>(grids.back().size());
  }

  auto point_report = [&](long index) {
    std::map<std::string, double> bindings;
    long rest = index;
    double p = default_p;
    for (std::size_t k = ranges.size(); k-- > 0;) {
      const long m = static_cast<long>(grids[k].size());
      const double value = grids[k][rest % m];
      rest /= m;
      if (ranges[k].name == "p") {
        p = value;
      } else {
        bindings[ranges[k].name] = value;
      }
    }
    OperatorSpec spec = spec_from_json(substitute_params(templ, bindings));
    std::ostringstream id;
    id << (spec.id.empty() ? to_string(spec.kind) : spec.id);
    for (const auto& [name, value] : bindings) id << ":" << name << "=" << value;
    spec.id = id.str();
    return run_spec(spec, make_exponent(p), opts);
  };

  std::vector<RunReport> reports(total);
  if (opts.threads > 1) {
    std::vector<std::future<RunReport>> futs;
    futs.reserve(total);
    for (long i = 0; i < total; ++i) {
      futs.push_back(std::async(std::launch::async, point_report, i));
    }
    for (long i = 0; i < total; ++i) reports[i] = futs[i].get();
  } else {
    for (long i = 0; i < total; ++i) reports[i] = point_report(i);
  }
  RunReport::csv_header(os);
  for (const RunReport& r : reports) r.append_csv(os);
}

void elasticity_sweep_csv(std::ostream& os, const SweepRange& nu_range, const SweepRange& p_range,
                          const Tolerances& tol) {
  RunReport::csv_header(os);
  for (double nu : nu_range.values()) {
    if (!elasticity_nu_admissible(nu)) continue;
    for (double p : p_range.values()) {
      const Exponent e = make_exponent(p);
      std::ostringstream id;
      id << "elasticity:nu=" << nu;
      const Verdict planar = elasticity_planar(nu, e, tol);
      os << id.str() << "," << p << "," << planar.criterion_id << ","
         << to_string(planar.status) << "," << planar.margin << "," << certificate_ref(planar)
         << "\n";
      const Verdict ndim = elasticity_ndim_sufficient(nu, e, tol);
      os << id.str() << "," << p << "," << ndim.criterion_id << "," << to_string(ndim.status)
         << "," << ndim.margin << "," << certificate_ref(ndim) << "\n";
    }
  }
}

OperatorSpec make_gamma_spec(double gamma) {
  OperatorSpec spec;
  spec.id = "example-gamma";
  spec.kind = OperatorKind::Scalar;
  spec.n = 2;
  spec.coefficient_class = CoefficientClass::Constant;
  Eigen::MatrixXcd A(2, 2);
  A << Complex(1, 0), Complex(0, gamma), Complex(0, -gamma), Complex(1, 0);
  spec.A.push_back(std::move(A));
  spec.validate();
  return spec;
}

OperatorSpec make_ex1_spec(double p) {
  if (std::abs(p - 2.0) < 1e-12) throw DomainError("the drift example requires p != 2");
  OperatorSpec spec;
  spec.id = "example-ex1";
  spec.kind = OperatorKind::Scalar;
  spec.n = 1;
  spec.coefficient_class = CoefficientClass::Constant;
  Eigen::MatrixXcd A(1, 1);
  A(0, 0) = Complex(1.0, 2.0 * std::sqrt(p - 1.0) / (p - 2.0));
  spec.A.push_back(std::move(A));
  Eigen::VectorXcd b(1);
  b[0] = Complex(0.0, 2.0);
  spec.b.push_back(std::move(b));
  spec.a.push_back(Complex(-1.0, 0.0));
  spec.validate();
  return spec;
}

GridFunction make_sigma_bump(int grid_points, double halfwidth) {
  Eigen::VectorXd origin = Eigen::VectorXd::Constant(2, -halfwidth);
  const double h = 2.0 * halfwidth / (grid_points - 1);
  const double r0 = 0.9 * halfwidth;
  return GridFunction::sample(
      2, 1, origin, h, {grid_points, grid_points}, 1, [&](const Eigen::VectorXd& x, int) {
        const double r = x.norm();
        if (r >= r0) return Complex(0, 0);
        const double c = std::cos(0.5 * M_PI * r / r0);
        return Complex(c * c, 0.0);
      });
}

}  // namespace dissip
