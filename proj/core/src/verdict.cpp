#include "dissip/verdict.hpp"

#include "dissip/errors.hpp"

namespace dissip {

std::string to_string(Status s) {
  switch (s) {
    case Status::ProvenDissipative: return "proven-dissipative";
    case Status::ProvenNotDissipative: return "proven-not-dissipative";
    case Status::SufficientHolds: return "sufficient-holds";
    case Status::NecessaryFails: return "necessary-fails";
    case Status::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

Status status_from_string(const std::string& s) {
  if (s == "proven-dissipative") return Status::ProvenDissipative;
  if (s == "proven-not-dissipative") return Status::ProvenNotDissipative;
  if (s == "sufficient-holds") return Status::SufficientHolds;
  if (s == "necessary-fails") return Status::NecessaryFails;
  if (s == "indeterminate") return Status::Indeterminate;
  throw ParseError("unknown verdict status '" + s + "'");
}

int exit_code_for(const Verdict& v) {
  if (v.holds()) return 0;
  if (v.fails()) return 1;
  return 2;
}

}  // namespace dissip
