#include "dissip/exponent.hpp"

#include <cmath>
#include <string>

#include "dissip/errors.hpp"

namespace dissip {

Exponent make_exponent(double p) {
  if (!std::isfinite(p) || p <= 1.0) {
    throw DomainError("exponent p must be finite and in (1, inf), got " + std::to_string(p));
  }
  Exponent e;
  e.p_ = p;
  e.conj_ = p / (p - 1.0);
  e.cpp_ = 4.0 / (p * e.conj_);
  e.skew_ = 1.0 - 2.0 / p;
  e.cp_ = e.skew_ * e.skew_;
  e.ratio_ = (p == 2.0) ? 0.0 : std::abs(p - 2.0) / (2.0 * std::sqrt(p - 1.0));
  return e;
}

Exponent Exponent::dual() const { return make_exponent(conj_); }

}  // namespace dissip
