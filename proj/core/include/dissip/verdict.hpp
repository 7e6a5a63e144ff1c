#ifndef DISSIP_VERDICT_HPP
#define DISSIP_VERDICT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dissip {

/// Claim strength of a criterion outcome.  Proven* statuses are reserved for
/// necessary-and-sufficient theorems applied within their hypotheses;
/// sufficient-only criteria can at most report SufficientHolds, necessary-only
/// ones at most NecessaryFails.
enum class Status {
  ProvenDissipative,
  ProvenNotDissipative,
  SufficientHolds,
  NecessaryFails,
  Indeterminate,
};

std::string to_string(Status s);
Status status_from_string(const std::string& s);

/// Witness attached to a failing (or boundary) verdict: a direction, a pair
/// (xi, eta), a sample location, or a reference to a grid function.
struct Certificate {
  std::string kind;           // "eigenvector", "xi-eta", "vector", "residual", "grid-function"
  std::vector<double> xi;     // primary witness
  std::vector<double> eta;    // secondary witness (xi-eta pairs)
  int sample_index = -1;      // offending field sample, -1 when global
  int direction = -1;         // coordinate direction h for systems, -1 otherwise
  double value = 0.0;         // criterion value re-evaluated at the witness
};

struct Verdict {
  Status status = Status::Indeterminate;
  std::string criterion_id;
  /// Signed distance to the criterion boundary (>= 0 when the criterion
  /// holds); exact semantics are documented per criterion.
  double margin = 0.0;
  std::optional<Certificate> certificate;
  /// Secondary named margins / diagnostics (solver residuals, per-condition
  /// margins, flags encoded as 0/1).
  std::map<std::string, double> details;

  bool holds() const {
    return status == Status::ProvenDissipative || status == Status::SufficientHolds;
  }
  bool fails() const {
    return status == Status::ProvenNotDissipative || status == Status::NecessaryFails;
  }
};

/// CLI contract: 0 holds, 1 proven failure, 2 indeterminate.
int exit_code_for(const Verdict& v);

}  // namespace dissip

#endif
