#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace hbba {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational with a power-of-two denominator: num / 2^exp.
///
/// Every probability that arises from uniformly distributed operand bits is
/// of this form, as are the moments (MED, MSE) of integer-valued errors
/// under such probabilities. Values are kept reduced: num is odd, or num is
/// zero and exp is zero, so structural equality is value equality.
class Dyadic {
public:
  Dyadic() = default;
  Dyadic(BigInt num, unsigned exp);
  static Dyadic integer(std::int64_t v) { return Dyadic(BigInt(v), 0); }
  static Dyadic zero() { return {}; }
  static Dyadic one() { return integer(1); }
  /// Every finite double is dyadic; throws std::invalid_argument otherwise.
  static Dyadic from_double(double v);

  const BigInt& num() const { return num_; }
  unsigned exp() const { return exp_; }

  bool is_zero() const { return num_ == 0; }
  bool is_probability() const;
  double to_double() const;
  /// "num/2^exp" (or just "num" when exp is 0).
  std::string to_fraction_string() const;
  /// Shortest decimal that round-trips the double rendering.
  std::string to_decimal_string() const;

  Dyadic operator-() const { return Dyadic(-num_, exp_); }
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }
  /// Multiply by 2^k (k may be negative).
  Dyadic scaled_pow2(int k) const;

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

private:
  void reduce();

  BigInt num_{0};
  unsigned exp_ = 0;
};

/// Probabilities are dyadic values constrained to [0, 1].
using DyadicProb = Dyadic;

} // namespace hbba
