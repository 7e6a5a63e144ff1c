#ifndef DISSIP_EXPONENT_HPP
#define DISSIP_EXPONENT_HPP

namespace dissip {

/// A Lebesgue exponent p in (1, inf) together with the derived constants used
/// by every criterion:
///   conjugate()  p' = p/(p-1)
///   cpp()        4/(p p')
///   cp()         (1 - 2/p)^2
/// The two satisfy cpp() + cp() = 1.
class Exponent {
 public:
  double p() const { return p_; }
  double conjugate() const { return conj_; }
  double cpp() const { return cpp_; }
  double cp() const { return cp_; }

  /// |p-2| / (2 sqrt(p-1)); invariant under p <-> p'.
  double sector_ratio() const { return ratio_; }

  /// 1 - 2/p (signed; flips sign under p <-> p').
  double skew_weight() const { return skew_; }

  bool is_two() const { return p_ == 2.0; }

  Exponent dual() const;

 private:
  friend Exponent make_exponent(double);
  double p_ = 2.0, conj_ = 2.0, cpp_ = 1.0, cp_ = 0.0, ratio_ = 0.0, skew_ = 0.0;
};

/// Throws DomainError unless p is finite and in (1, inf).
Exponent make_exponent(double p);

}  // namespace dissip

#endif
