#include "qtyp/rational.hpp"

namespace qtyp {

Rational::Rational(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  v_ = mpq_class(static_cast<long>(num), static_cast<long>(den));
  v_.canonicalize();
}

Rational Rational::factorial(unsigned long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  Rational r;
  r.v_ = mpq_class(f);
  return r;
}

Rational Rational::operator-() const {
  Rational r;
  r.v_ = -v_;
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  Rational r;
  r.v_ = v_ + o.v_;
  return r;
}

Rational Rational::operator-(const Rational& o) const {
  Rational r;
  r.v_ = v_ - o.v_;
  return r;
}

Rational Rational::operator*(const Rational& o) const {
  Rational r;
  r.v_ = v_ * o.v_;
  return r;
}

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
  Rational r;
  r.v_ = v_ / o.v_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  v_ += o.v_;
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  v_ -= o.v_;
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  v_ *= o.v_;
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
  v_ /= o.v_;
  return *this;
}

}  // namespace qtyp
