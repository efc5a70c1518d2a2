#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qtyp {

/// Raised when an exact computation would exceed its configured size bound
/// (e.g. a moment power beyond the factorial limit).
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Exact rational number, always kept canonical: reduced, denominator > 0.
/// Arbitrary-precision digits are delegated to GMP; this type pins down the
/// interface the rest of the library relies on (exact equality, "p/q"
/// rendering, factorials).
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long long value) : v_(static_cast<long>(value)) {}
  Rational(long long num, long long den);

  static Rational factorial(unsigned long n);

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;  // throws on division by zero

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  bool operator==(const Rational& o) const { return v_ == o.v_; }
  bool operator!=(const Rational& o) const { return v_ != o.v_; }
  bool operator<(const Rational& o) const { return v_ < o.v_; }
  bool operator<=(const Rational& o) const { return v_ <= o.v_; }
  bool operator>(const Rational& o) const { return v_ > o.v_; }
  bool operator>=(const Rational& o) const { return v_ >= o.v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }

  double to_double() const { return v_.get_d(); }

  /// Canonical text form: "num/den", or just "num" when den == 1.
  std::string str() const { return v_.get_str(); }

 private:
  explicit Rational(mpq_class v) : v_(std::move(v)) {}
  mpq_class v_;
};

}  // namespace qtyp
