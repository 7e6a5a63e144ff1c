#ifndef DISSIP_HARNESS_HPP
#define DISSIP_HARNESS_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dissip/exponent.hpp"
#include "dissip/json_io.hpp"
#include "dissip/probe.hpp"
#include "dissip/scalar_criteria.hpp"
#include "dissip/system_criteria.hpp"
#include "dissip/tolerances.hpp"
#include "dissip/verdict.hpp"

namespace dissip {

struct RunOptions {
  std::string criterion = "all";
  bool with_probe = false;
  Tolerances tol;
  int threads = 1;
  SearchOptions probe;
  SphereSearchConfig sphere;
  PolynomialConditionParams poly;
  bool poly_best_effort = false;
};

struct CriterionOutcome {
  Verdict verdict;
  double millis = 0.0;
  std::string oracle_agreement;  // filled when the probe ran
};

struct ProbeSummary {
  double value = 0.0;
  bool converged = false;
  long evaluations = 0;
};

struct RunReport {
  std::string spec_id;
  double p = 2.0;
  std::vector<CriterionOutcome> outcomes;
  std::optional<ProbeSummary> probe;
  double total_millis = 0.0;

  Json to_json() const;
  int exit_code() const;  // 0 all-holds, 1 any proven failure, 2 indeterminate present
  static void csv_header(std::ostream& os);
  void append_csv(std::ostream& os) const;
};

/// Dispatches every criterion applicable to spec.kind (or the one selected in
/// options), optionally runs the counterexample probe, and assembles the
/// agreement matrix.
RunReport run_spec(const OperatorSpec& spec, const Exponent& e, const RunOptions& opts = {});
RunReport run_spec_file(const std::string& path, const Exponent& e, const RunOptions& opts = {});

struct SweepRange {
  std::string name;
  double lo = 0.0, hi = 0.0, step = 1.0;
  std::vector<double> values() const;
};

/// Parses "nu=a:b:step,p=a:b:step" (any parameter names).
std::vector<SweepRange> parse_sweep_spec(const std::string& text);

/// Recursively replaces "$name" string placeholders by bound values.
Json substitute_params(const Json& templ, const std::map<std::string, double>& bindings);

/// Cartesian sweep over a spec template; one CSV row per (point, criterion),
/// deterministic ordering regardless of thread count.  A range named "p"
/// varies the exponent; every other range substitutes into the template.
void spec_sweep_csv(std::ostream& os, const Json& templ, const std::vector<SweepRange>& ranges,
                    double default_p, const RunOptions& opts);

/// Closed-form planar/ndim elasticity sweep (no template needed).
void elasticity_sweep_csv(std::ostream& os, const SweepRange& nu_range, const SweepRange& p_range,
                          const Tolerances& tol);

// Regression-corpus builders.
OperatorSpec make_gamma_spec(double gamma);
OperatorSpec make_ex1_spec(double p);
GridFunction make_sigma_bump(int grid_points = 33, double halfwidth = 1.0);

}  // namespace dissip

#endif
