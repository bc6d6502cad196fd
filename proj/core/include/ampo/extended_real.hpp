#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "ampo/errors.hpp"

namespace ampo {

// Real line plus the two infinities. Infinite values may be compared and
// max'ed, but any attempt to pull them into plain arithmetic throws: the
// infinities are sentinels, not numbers to sum over.
class ExtendedReal {
 public:
  ExtendedReal() : v_(0.0) {}

  static ExtendedReal finite(double v) {
    if (std::isnan(v) || std::isinf(v)) throw InputError("ExtendedReal::finite needs a finite value");
    return ExtendedReal(v);
  }
  static ExtendedReal neg_inf() { return ExtendedReal(-std::numeric_limits<double>::infinity()); }
  static ExtendedReal pos_inf() { return ExtendedReal(std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_neg_inf() const { return std::isinf(v_) && v_ < 0; }
  bool is_pos_inf() const { return std::isinf(v_) && v_ > 0; }

  // Finite payload; throws on a sentinel so infinities cannot leak into sums.
  double value() const {
    if (!is_finite()) throw NumericalError("non-finite ExtendedReal used as a number");
    return v_;
  }

  // Raw payload including +-inf, for callers that handle the sentinels.
  double raw() const { return v_; }

  friend bool operator<(ExtendedReal a, ExtendedReal b) { return a.v_ < b.v_; }
  friend bool operator>(ExtendedReal a, ExtendedReal b) { return a.v_ > b.v_; }
  friend bool operator<=(ExtendedReal a, ExtendedReal b) { return a.v_ <= b.v_; }
  friend bool operator>=(ExtendedReal a, ExtendedReal b) { return a.v_ >= b.v_; }
  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }

  friend ExtendedReal max(ExtendedReal a, ExtendedReal b) { return a.v_ >= b.v_ ? a : b; }

  friend double operator+(ExtendedReal a, double b) { return a.value() + b; }
  friend double operator+(double a, ExtendedReal b) { return a + b.value(); }
  friend double operator-(ExtendedReal a, double b) { return a.value() - b; }

  std::string str() const {
    if (is_neg_inf()) return "-inf";
    if (is_pos_inf()) return "inf";
    return std::to_string(v_);
  }

 private:
  explicit ExtendedReal(double v) : v_(v) {}
  double v_;
};

}  // namespace ampo
