#include "rmt/exact.hpp"

#include "rmt/error.hpp"

#include <cctype>
#include <cstdlib>

namespace rmt {

namespace {

BigInt parse_integer(std::string_view digits, std::string_view original) {
  require(!digits.empty(), ErrorKind::parameter, "malformed rational '" + std::string(original) + "'");
  BigInt value = 0;
  for (char c : digits) {
    require(std::isdigit(static_cast<unsigned char>(c)) != 0, ErrorKind::parameter,
            "malformed rational '" + std::string(original) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

BigInt pow10(long exponent) {
  BigInt result = 1;
  for (long i = 0; i < exponent; ++i) result *= 10;
  return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  require(!text.empty(), ErrorKind::parameter, "empty rational");

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), original);
    BigInt den = parse_integer(text.substr(slash + 1), original);
    require(den != 0, ErrorKind::parameter, "zero denominator in '" + std::string(original) + "'");
    value = Rational(num, den);
  } else {
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      std::string exp_text(text.substr(e + 1));
      char* end = nullptr;
      exponent = std::strtol(exp_text.c_str(), &end, 10);
      require(!exp_text.empty() && end != nullptr && *end == '\0', ErrorKind::parameter,
              "malformed exponent in '" + std::string(original) + "'");
      text = text.substr(0, e);
    }
    std::string digits;
    long fraction_digits = 0;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
      fraction_digits = static_cast<long>(text.size() - dot - 1);
    } else {
      digits = std::string(text);
    }
    require(exponent > -4000 && exponent < 4000, ErrorKind::parameter,
            "exponent out of range in '" + std::string(original) + "'");
    const long scale = exponent - fraction_digits;
    BigInt mantissa = parse_integer(digits, original);
    value = scale >= 0 ? Rational(mantissa * pow10(scale)) : Rational(mantissa, pow10(-scale));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational rational_pow(const Rational& base, int exponent) {
  Rational result = 1;
  Rational factor = exponent >= 0 ? base : Rational(1) / base;
  for (int i = 0; i < std::abs(exponent); ++i) result *= factor;
  return result;
}

ExactComplex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0:
      return {1, 0};
    case 1:
      return {0, 1};
    case 2:
      return {-1, 0};
    default:
      return {0, -1};
  }
}

}  // namespace rmt
