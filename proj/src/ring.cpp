#include "rmt/ring.hpp"

#include "rmt/error.hpp"

namespace rmt {

RingElement RingElement::monomial(const Rational& c, int n_power, int half_n_power) {
  require(n_power >= 0, ErrorKind::parameter, "RingElement: negative power of n");
  RingElement r;
  if (c != 0) r.terms_[{n_power, half_n_power}] = c;
  return r;
}

RingElement RingElement::n_grade(int a) const {
  RingElement r;
  for (const auto& [k, c] : terms_)
    if (k.first == a) r.terms_[{0, k.second}] = c;
  return r;
}

int RingElement::max_half_n_power() const {
  require(!terms_.empty(), ErrorKind::invariant, "max_half_n_power of zero");
  int best = terms_.begin()->first.second;
  for (const auto& [k, c] : terms_) best = std::max(best, k.second);
  return best;
}

Rational RingElement::coefficient(int a, int b) const {
  const auto it = terms_.find({a, b});
  return it == terms_.end() ? Rational(0) : it->second;
}

RingElement& RingElement::operator+=(const RingElement& o) {
  for (const auto& [k, c] : o.terms_) {
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

RingElement& RingElement::operator-=(const RingElement& o) {
  for (const auto& [k, c] : o.terms_) {
    auto [it, inserted] = terms_.try_emplace(k, Rational(-c));
    if (!inserted) {
      it->second -= c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

RingElement& RingElement::operator*=(const RingElement& o) {
  RingElement r;
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) r += monomial(ca * cb, ka.first + kb.first, ka.second + kb.second);
  return *this = std::move(r);
}

std::string RingElement::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [k, c] : terms_) {
    std::string coef = rmt::to_string(c < 0 ? Rational(-c) : c);
    if (out.empty())
      out += c < 0 ? "-" : "";
    else
      out += c < 0 ? " - " : " + ";
    std::string factors;
    if (k.first == 1) factors += "*n";
    if (k.first > 1) factors += "*n^" + std::to_string(k.first);
    if (k.second != 0) {
      if (k.second % 2 == 0)
        factors += "*N^" + std::string(k.second < 0 ? "(" : "") + std::to_string(k.second / 2) +
                   (k.second < 0 ? ")" : "");
      else
        factors += "*N^(" + std::to_string(k.second) + "/2)";
    }
    if (coef == "1" && !factors.empty())
      out += factors.substr(1);
    else
      out += coef + factors;
  }
  return out;
}

}  // namespace rmt
