// SPDX-License-Identifier: MIT
// Fixed-point accumulator with integer addition, so sums are associative and
// independent of summation order.
#pragma once

#include <cmath>
#include <compare>

#include "favard/errors.hpp"

namespace favard {

__extension__ typedef __int128 int128_t;

class FixedSum {
 public:
  static constexpr int kFractionBits = 64;

  FixedSum() = default;

  static FixedSum of(double v) {
    FixedSum s;
    s.add(v);
    return s;
  }

  void add(double v) { q_ += quantize(v); }

  FixedSum& operator+=(const FixedSum& o) {
    q_ += o.q_;
    return *this;
  }
  friend FixedSum operator+(FixedSum a, const FixedSum& b) { return a += b; }
  friend bool operator==(const FixedSum& a, const FixedSum& b) { return a.q_ == b.q_; }
  friend auto operator<=>(const FixedSum& a, const FixedSum& b) { return a.q_ <=> b.q_; }

  double value() const { return std::ldexp(static_cast<double>(q_), -kFractionBits); }
  bool is_zero() const { return q_ == 0; }

 private:
  static int128_t quantize(double v) {
    if (!std::isfinite(v) || std::fabs(v) >= std::ldexp(1.0, 60)) {
      throw InvariantError("FixedSum: contribution outside the representable range");
    }
    return static_cast<int128_t>(std::nearbyint(std::ldexp(v, kFractionBits)));
  }

  int128_t q_ = 0;
};

}  // namespace favard
