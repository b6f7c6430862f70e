#pragma once

// Exact coefficients sum c * n^a * N^{b/2}: n is the replica number, N the
// matrix size (half-integer powers allowed).

#include "rmt/exact.hpp"

#include <map>
#include <string>
#include <utility>

namespace rmt {

class RingElement {
 public:
  using Key = std::pair<int, int>;  // (a, b)

  RingElement() = default;
  RingElement(long c) : RingElement(Rational(c)) {}
  RingElement(const Rational& c) {
    if (c != 0) terms_[{0, 0}] = c;
  }

  /// c * n^a * N^{b/2}
  static RingElement monomial(const Rational& c, int n_power, int half_n_power);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, Rational>& terms() const { return terms_; }

  /// Terms with n^a; the result has a = 0.
  RingElement n_grade(int a) const;
  /// Largest b over all terms; requires a non-zero element.
  int max_half_n_power() const;
  /// Coefficient of n^a N^{b/2}.
  Rational coefficient(int a, int b) const;

  RingElement& operator+=(const RingElement& o);
  RingElement& operator-=(const RingElement& o);
  RingElement& operator*=(const RingElement& o);
  friend RingElement operator+(RingElement a, const RingElement& b) { return a += b; }
  friend RingElement operator-(RingElement a, const RingElement& b) { return a -= b; }
  friend RingElement operator*(RingElement a, const RingElement& b) { return a *= b; }
  friend bool operator==(const RingElement&, const RingElement&) = default;

  /// "3/2*n*N^(1/2) - N^(-1)" style text; "0" when empty.
  std::string to_string() const;

 private:
  std::map<Key, Rational> terms_;
};

}  // namespace rmt
