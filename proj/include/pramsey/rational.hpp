#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pramsey/errors.hpp"

namespace pramsey {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational scalar. Always normalized (lowest terms, denominator > 0).
///
/// Every finite double is a dyadic rational, so `from_double` is exact; this
/// is what lets float-valued distance sets from the pipeline be re-checked
/// against rational separation margins without rounding.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rat(BigInt n) : num_(std::move(n)), den_(1) {}
  Rat(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

  static Rat from_double(double x) {
    if (!std::isfinite(x)) raise(ErrorKind::InvalidInput, "non-finite value has no rational form");
    if (x == 0.0) return Rat(0);
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [1/2, 1)
    // 53 doublings make the mantissa integral.
    auto mant = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    BigInt num(mant), den(1);
    if (exp >= 0) {
      num <<= exp;
    } else {
      den <<= -exp;
    }
    return Rat(std::move(num), std::move(den));
  }

  /// Accepts "p/q", integers, and finite decimals ("-1.25").
  static std::optional<Rat> parse(std::string_view s);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return boost::multiprecision::cpp_rational(num_, den_).convert_to<double>();
  }

  /// "p/q" for non-integers, "p" otherwise. Round-trips through parse().
  std::string str() const;

  Rat operator-() const { return Rat(-num_, den_, no_normalize{}); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) raise(ErrorKind::InvalidInput, "rational division by zero");
    return Rat(a.num_ * b.den_, a.den_ * b.num_);
  }

  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    BigInt lhs = a.num_ * b.den_, rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend Rat abs(const Rat& a) { return a.num_ < 0 ? -a : a; }

 private:
  struct no_normalize {};
  Rat(BigInt n, BigInt d, no_normalize) : num_(std::move(n)), den_(std::move(d)) {}

  void normalize() {
    if (den_ == 0) raise(ErrorKind::InvalidInput, "rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

using RatMatrix = std::vector<std::vector<Rat>>;

}  // namespace pramsey
