#include "rmt/semicircle.hpp"

#include "rmt/error.hpp"
#include "rmt/partitions.hpp"

#include <cmath>
#include <numbers>

namespace rmt::semicircle {

namespace {

void check(SemicircleParams p) {
  require(p.sigma > 0.0 && std::isfinite(p.sigma), ErrorKind::parameter, "semicircle: sigma must be positive");
}

}  // namespace

double density(double x, SemicircleParams p) {
  check(p);
  const double s2 = p.sigma * p.sigma;
  const double r = 4.0 * s2 - x * x;
  if (r <= 0.0) return 0.0;
  return std::sqrt(r) / (2.0 * std::numbers::pi * s2);
}

double cdf(double x, SemicircleParams p) {
  check(p);
  const double edge = 2.0 * p.sigma;
  if (x <= -edge) return 0.0;
  if (x >= edge) return 1.0;
  const double s2 = p.sigma * p.sigma;
  return 0.5 + x * std::sqrt(4.0 * s2 - x * x) / (4.0 * std::numbers::pi * s2) +
         std::asin(x / edge) / std::numbers::pi;
}

double moment(int k, SemicircleParams p) {
  check(p);
  require(k >= 0, ErrorKind::parameter, "semicircle moment: negative order");
  if (k % 2 == 1) return 0.0;
  return catalan(k / 2).convert_to<double>() * std::pow(p.sigma, k);
}

std::complex<double> resolvent(std::complex<double> z, SemicircleParams p) {
  check(p);
  const double edge = 2.0 * p.sigma;
  require(!(z.imag() == 0.0 && std::abs(z.real()) <= edge), ErrorKind::parameter,
          "resolvent: z lies on the cut [-2 sigma, 2 sigma]; use stieltjes_invert with z = x +/- i eps");
  // Roots of sigma^2 G^2 - z G + 1 = 0 have product 1/sigma^2; the physical
  // one is the smaller in modulus, which is the branch that decays like 1/z.
  const double s2 = p.sigma * p.sigma;
  const std::complex<double> root = std::sqrt(z * z - 4.0 * s2);
  const std::complex<double> g1 = (z - root) / (2.0 * s2);
  const std::complex<double> g2 = (z + root) / (2.0 * s2);
  return std::abs(g1) <= std::abs(g2) ? g1 : g2;
}

std::complex<double> solve_schwinger_dyson(std::complex<double> z, SemicircleParams p) {
  check(p);
  require(std::abs(z) > 2.0 * p.sigma, ErrorKind::parameter, "solve_schwinger_dyson needs |z| > 2 sigma");
  const double s2 = p.sigma * p.sigma;
  std::complex<double> g = 1.0 / z;
  for (int it = 0; it < 10000; ++it) {
    const std::complex<double> next = 1.0 / (z - s2 * g);
    if (std::abs(next - g) <= 1e-14) return next;
    g = next;
  }
  fail(ErrorKind::numerical, "Schwinger-Dyson iteration did not converge");
}

double stieltjes_invert(const std::function<std::complex<double>(std::complex<double>)>& g, double x,
                        double eps) {
  require(eps > 0.0, ErrorKind::parameter, "stieltjes_invert: eps must be positive");
  const std::complex<double> below = g({x, -eps});
  const std::complex<double> above = g({x, eps});
  const std::complex<double> value = (below - above) / std::complex<double>(0.0, 2.0 * std::numbers::pi);
  return value.real();
}

}  // namespace rmt::semicircle
