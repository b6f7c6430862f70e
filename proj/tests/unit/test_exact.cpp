#include "doctest.h"
#include "rmt/error.hpp"
#include "rmt/exact.hpp"

using namespace rmt;

TEST_CASE("parse_rational reads integers, fractions and decimals exactly") {
  CHECK(parse_rational("7") == 7);
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK(parse_rational("2.5e-3") == Rational(1, 400));
  CHECK(parse_rational("1.5E2") == 150);
  CHECK(parse_rational("+6/4") == Rational(3, 2));
}

TEST_CASE("parse_rational rejects garbage") {
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1.2.3"), Error);
}

TEST_CASE("to_string and pow") {
  CHECK(to_string(Rational(6, 4)) == "3/2");
  CHECK(to_string(Rational(-4, 2)) == "-2");
  CHECK(rational_pow(Rational(2, 3), 3) == Rational(8, 27));
  CHECK(rational_pow(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(rational_pow(Rational(5), 0) == 1);
}

TEST_CASE("i_power cycles with period 4") {
  CHECK(i_power(0) == ExactComplex(1));
  CHECK(i_power(1) == ExactComplex(0, 1));
  CHECK(i_power(2) == ExactComplex(-1));
  CHECK(i_power(-1) == ExactComplex(0, -1));
  CHECK(i_power(7) == ExactComplex(0, -1));
  ExactComplex z(1, 2);
  CHECK(z * z == ExactComplex(-3, 4));
}
