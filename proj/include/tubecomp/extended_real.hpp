#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tubecomp {

/// A nonnegative quantity that is either finite or +infinity.
/// Arithmetic with the infinite value is deliberately not provided;
/// callers must branch on is_finite() and handle the infinite case
/// where it has a defined meaning.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double v) : v_(v) {}

  static constexpr ExtendedReal infinity() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }

  bool is_finite() const { return std::isfinite(v_); }

  /// Finite value; throws if infinite.
  double value() const {
    if (!is_finite()) throw std::domain_error("ExtendedReal: value() on infinite");
    return v_;
  }

  /// Finite value, or `cap` when infinite.
  double value_or(double cap) const { return is_finite() ? v_ : cap; }

  /// Underlying double; +inf allowed. Useful for comparisons only.
  double raw() const { return v_; }

  friend bool operator<(ExtendedReal a, ExtendedReal b) { return a.v_ < b.v_; }
  friend bool operator<(double a, ExtendedReal b) { return a < b.v_; }
  friend bool operator<(ExtendedReal a, double b) { return a.v_ < b; }
  friend bool operator<=(double a, ExtendedReal b) { return a <= b.v_; }
  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }

 private:
  double v_ = 0.0;
};

}  // namespace tubecomp
