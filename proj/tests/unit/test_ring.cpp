#include "doctest.h"
#include "rmt/error.hpp"
#include "rmt/ring.hpp"

using namespace rmt;

TEST_CASE("ring arithmetic collects like terms") {
  const RingElement n = RingElement::monomial(1, 1, 0);
  const RingElement big_n = RingElement::monomial(1, 0, 2);
  RingElement a = n + big_n;
  a *= a;
  CHECK(a.coefficient(2, 0) == 1);
  CHECK(a.coefficient(1, 2) == 2);
  CHECK(a.coefficient(0, 4) == 1);
  CHECK(a.terms().size() == 3);
  CHECK((a - a).is_zero());
  CHECK((n - n + RingElement(0)).is_zero());
}

TEST_CASE("half powers of N multiply") {
  const RingElement r = RingElement::monomial(Rational(1, 2), 0, -1) * RingElement::monomial(4, 0, -3);
  CHECK(r == RingElement::monomial(2, 0, -4));
  CHECK(r.max_half_n_power() == -4);
}

TEST_CASE("n grades") {
  const RingElement r = RingElement::monomial(3, 0, 0) + RingElement::monomial(5, 1, -2) +
                        RingElement::monomial(7, 1, 2);
  CHECK(r.n_grade(0) == RingElement(3));
  CHECK(r.n_grade(1).max_half_n_power() == 2);
  CHECK(r.n_grade(2).is_zero());
  CHECK_THROWS_AS(RingElement().max_half_n_power(), Error);
  CHECK_THROWS_AS(RingElement::monomial(1, -1, 0), Error);
}

TEST_CASE("text form") {
  CHECK(RingElement().to_string() == "0");
  CHECK(RingElement::monomial(1, 1, 2).to_string() == "n*N^1");
  CHECK(RingElement::monomial(Rational(-3, 2), 0, -1).to_string() == "-3/2*N^(-1/2)");
  CHECK((RingElement(1) - RingElement::monomial(1, 0, -2)).to_string() == "-N^(-1) + 1");
}
