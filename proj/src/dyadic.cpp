#include "hbba/dyadic.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hbba {

Dyadic::Dyadic(BigInt num, unsigned exp) : num_(std::move(num)), exp_(exp) {
  reduce();
}

void Dyadic::reduce() {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  if (exp_ == 0)
    return;
  // lsb() is defined on the magnitude only.
  BigInt mag = num_ < 0 ? BigInt(-num_) : num_;
  unsigned tz = static_cast<unsigned>(boost::multiprecision::lsb(mag));
  unsigned shift = tz < exp_ ? tz : exp_;
  if (shift) {
    bool negative = num_ < 0;
    num_ = mag >> shift;
    if (negative)
      num_ = -num_;
    exp_ -= shift;
  }
}

Dyadic Dyadic::from_double(double v) {
  if (!std::isfinite(v))
    throw std::invalid_argument("non-finite value has no dyadic form");
  if (v == 0.0)
    return {};
  int e = 0;
  double m = std::frexp(v, &e); // v = m * 2^e, 0.5 <= |m| < 1
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  int pow2 = e - 53;
  if (pow2 >= 0)
    return Dyadic(BigInt(mant) << pow2, 0);
  return Dyadic(BigInt(mant), static_cast<unsigned>(-pow2));
}

bool Dyadic::is_probability() const {
  return num_ >= 0 && num_ <= (BigInt(1) << exp_);
}

double Dyadic::to_double() const {
  if (num_ == 0)
    return 0.0;
  // Convert via the top 64 bits so large numerators do not overflow.
  BigInt mag = num_ < 0 ? BigInt(-num_) : num_;
  auto bits = static_cast<long>(boost::multiprecision::msb(mag)) + 1;
  long drop = bits > 64 ? bits - 64 : 0;
  auto top = static_cast<std::uint64_t>(mag >> drop);
  double d = std::ldexp(static_cast<double>(top), static_cast<int>(drop - static_cast<long>(exp_)));
  return num_ < 0 ? -d : d;
}

std::string Dyadic::to_fraction_string() const {
  if (exp_ == 0)
    return num_.str();
  return num_.str() + "/2^" + std::to_string(exp_);
}

std::string Dyadic::to_decimal_string() const {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, to_double());
  return std::string(buf, ptr);
}

namespace {

// Bring two dyadics to a common exponent.
std::pair<BigInt, BigInt> aligned(const Dyadic& a, const Dyadic& b, unsigned& exp) {
  exp = a.exp() > b.exp() ? a.exp() : b.exp();
  return {a.num() << (exp - a.exp()), b.num() << (exp - b.exp())};
}

} // namespace

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  unsigned e = 0;
  auto [x, y] = aligned(a, b, e);
  return Dyadic(x + y, e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  unsigned e = 0;
  auto [x, y] = aligned(a, b, e);
  return Dyadic(x - y, e);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_);
}

Dyadic Dyadic::scaled_pow2(int k) const {
  if (k >= 0) {
    if (static_cast<unsigned>(k) <= exp_)
      return Dyadic(num_, exp_ - static_cast<unsigned>(k));
    return Dyadic(num_ << (static_cast<unsigned>(k) - exp_), 0);
  }
  return Dyadic(num_, exp_ + static_cast<unsigned>(-k));
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  unsigned e = 0;
  auto [x, y] = aligned(a, b, e);
  if (x < y)
    return std::strong_ordering::less;
  if (x > y)
    return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

} // namespace hbba
