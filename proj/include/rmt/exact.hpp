#pragma once

// Exact integer and rational arithmetic shared by the combinatorial and
// symbolic modules.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <string>
#include <string_view>

namespace rmt {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "7", "-3/4", "0.125" or "2.5e-3" into an exact rational. Decimal
/// input is read digit by digit, so "0.1" is exactly 1/10.
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "p" when q == 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

Rational rational_pow(const Rational& base, int exponent);

/// Gaussian rational a + ib.
struct ExactComplex {
  Rational re{0};
  Rational im{0};

  ExactComplex() = default;
  ExactComplex(Rational real) : re(std::move(real)) {}
  ExactComplex(Rational real, Rational imag) : re(std::move(real)), im(std::move(imag)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  ExactComplex& operator+=(const ExactComplex& b) { return *this = *this + b; }
  ExactComplex& operator*=(const ExactComplex& b) { return *this = *this * b; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// i^k for any integer k.
ExactComplex i_power(int k);

}  // namespace rmt
