#include "doctest.h"
#include "rmt/error.hpp"
#include "rmt/semicircle.hpp"

#include <cmath>
#include <numbers>

using namespace rmt;
using namespace rmt::semicircle;
using C = std::complex<double>;

namespace {

// Composite Gauss-Legendre-free quadrature: substitute x = 2 s sin(theta)
// so the square-root endpoint becomes smooth, then Simpson on theta.
double integrate_semicircle(int k, double sigma) {
  const int m = 2000;
  const double a = -std::numbers::pi / 2, b = std::numbers::pi / 2, h = (b - a) / m;
  auto f = [&](double th) {
    const double x = 2 * sigma * std::sin(th);
    return std::pow(x, k) * density(x, {sigma}) * 2 * sigma * std::cos(th);
  };
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}

}  // namespace

TEST_CASE("density") {
  CHECK(density(0, {1}) == doctest::Approx(1 / std::numbers::pi));
  CHECK(density(2, {1}) == 0);
  CHECK(density(-2, {1}) == 0);
  CHECK(density(5, {1}) == 0);
  CHECK(std::abs(integrate_semicircle(0, 1) - 1) < 1e-8);
  CHECK_THROWS_AS(density(0, {0}), Error);
}

TEST_CASE("moments") {
  CHECK(moment(1, {1}) == 0);
  CHECK(moment(2, {1}) == 1);
  CHECK(moment(4, {1}) == 2);
  CHECK(moment(6, {1}) == 5);
  CHECK(moment(4, {2}) == 32);
  for (int k = 0; k <= 10; ++k) CHECK(std::abs(moment(k, {1.3}) - integrate_semicircle(k, 1.3)) < 1e-7);
}

TEST_CASE("cdf") {
  CHECK(cdf(0, {1}) == doctest::Approx(0.5));
  CHECK(cdf(-3, {1}) == 0);
  CHECK(cdf(3, {1}) == 1);
  CHECK(cdf(1, {1}) == doctest::Approx(0.5 + std::sqrt(3.0) / (4 * std::numbers::pi) + 1.0 / 6));
}

TEST_CASE("resolvent") {
  CHECK(std::abs(resolvent(3, {1}) - C((3 - std::sqrt(5.0)) / 2)) < 1e-12);
  const C g = resolvent(C(0, 10), {1});
  CHECK(std::abs(g.real()) < 1e-15);
  CHECK(g.imag() < 0);
  CHECK(std::abs(g) <= 1 / 10.0);  // 1 / dist(z, [-2, 2])
  for (int i = 0; i < 100; ++i) {
    const double r = 2.5 + 97.5 * i / 99.0;
    const double th = 2 * std::numbers::pi * (i * 0.61803398875);
    const C z = std::polar(r, th);
    const C gz = resolvent(z, {1});
    CHECK(std::abs(gz - 1.0 / (z - gz)) < 1e-12);
    if (r >= 4) CHECK(std::abs(gz - 1.0 / z - 1.0 / (z * z * z)) <= 3 / std::pow(r, 5));
  }
  CHECK_THROWS_AS(resolvent(1.0, {1}), Error);
}

TEST_CASE("Schwinger-Dyson iteration") {
  CHECK(std::abs(solve_schwinger_dyson(3, {1}) - C((3 - std::sqrt(5.0)) / 2)) < 1e-12);
  CHECK(std::abs(solve_schwinger_dyson(3, {1e-9}) - C(1.0 / 3)) < 1e-12);
  CHECK(std::abs(solve_schwinger_dyson(2.5, {1}) - resolvent(2.5, {1})) < 1e-10);
  CHECK(std::abs(solve_schwinger_dyson(C(1, 2.2), {1}) - resolvent(C(1, 2.2), {1})) < 1e-12);
  CHECK_THROWS_AS(solve_schwinger_dyson(1.5, {1}), Error);
}

TEST_CASE("Stieltjes inversion") {
  auto g = [](C z) { return resolvent(z, {1}); };
  CHECK(std::abs(stieltjes_invert(g, 0, 1e-6) - 1 / std::numbers::pi) < 1e-5);
  CHECK(std::abs(stieltjes_invert(g, 3, 1e-6)) < 1e-5);
  double prev = 1;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const double err = std::abs(stieltjes_invert(g, 1, eps) - std::sqrt(3.0) / (2 * std::numbers::pi));
    CHECK(err < prev);
    prev = err;
  }
  // midpoint grid: at exactly +-2 sigma the smoothing error is O(sqrt(eps))
  for (int i = 0; i < 40; ++i) {
    const double x = -2.5 + 5.0 * (i + 0.5) / 40;
    CHECK(std::abs(stieltjes_invert(g, x, 1e-6) - density(x, {1})) < 1e-4);
  }
  CHECK_THROWS_AS(stieltjes_invert(g, 0, 0), Error);
}
