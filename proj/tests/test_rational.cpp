#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtyp/rational.hpp"

using qtyp::Rational;

TEST_CASE("canonical form") {
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(-2, 4).str() == "-1/2");
  CHECK(Rational(1, -2).str() == "-1/2");
  CHECK(Rational(0, 7).str() == "0");
  CHECK(Rational(6, 3).str() == "2");
  CHECK(Rational(7).str() == "7");
}

TEST_CASE("arithmetic") {
  CHECK(Rational(1, 2) + Rational(1, 6) == Rational(2, 3));
  CHECK(Rational(1, 2) - Rational(2, 3) == Rational(-1, 6));
  CHECK(Rational(3, 4) * Rational(2, 9) == Rational(1, 6));
  CHECK(Rational(3, 4) / Rational(9, 2) == Rational(1, 6));
  CHECK(-Rational(1, 3) == Rational(-1, 3));

  Rational acc;
  for (int i = 1; i <= 4; ++i) acc += Rational(1, i);
  CHECK(acc == Rational(25, 12));

  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
}

TEST_CASE("comparisons and sign") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 3) > Rational(-1, 2));
  CHECK(Rational(5, 10) <= Rational(1, 2));
  CHECK(Rational(0).is_zero());
  CHECK(Rational(-2, 3).sign() == -1);
  CHECK(Rational(2, 3).sign() == 1);
}

TEST_CASE("factorial") {
  CHECK(Rational::factorial(0) == Rational(1));
  CHECK(Rational::factorial(5) == Rational(120));
  CHECK(Rational::factorial(10) == Rational(3628800));
  CHECK(Rational::factorial(20) == Rational(2432902008176640000LL));
  // stays exact far beyond 64-bit range
  CHECK(Rational::factorial(66) / Rational::factorial(65) == Rational(66));
}

TEST_CASE("to_double") {
  CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(Rational(-7, 2).to_double() == doctest::Approx(-3.5).epsilon(1e-15));
  CHECK(Rational(10).to_double() == 10.0);
}
