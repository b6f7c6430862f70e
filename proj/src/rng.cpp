#include "rmt/rng.hpp"

#include "rmt/error.hpp"

#include <cmath>

namespace rmt {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngHandle derive(RngHandle parent, std::uint64_t index) {
  std::uint64_t mix = parent.stream ^ 0x6A09E667F3BCC909ULL;
  std::uint64_t a = splitmix64(mix);
  std::uint64_t b = index + 0xBB67AE8584CAA73BULL;
  return {parent.seed, a ^ splitmix64(b)};
}

Rng::Rng(RngHandle handle) : handle_(handle) {
  std::uint64_t stream_state = handle.stream;
  std::uint64_t sm = handle.seed ^ splitmix64(stream_state);
  for (auto& word : state_) word = splitmix64(sm);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  require(bound > 0, ErrorKind::parameter, "Rng::below needs a positive bound");
  // 128-bit multiply-shift with rejection of the biased low region.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_normal_ = true;
  return u * f;
}

double Rng::rademacher() { return (next_u64() >> 63) != 0 ? 1.0 : -1.0; }

std::complex<double> Rng::gaussian_complex(double stddev) {
  require(stddev > 0.0 && std::isfinite(stddev), ErrorKind::parameter,
          "gaussian_complex: stddev must be positive");
  const double scale = stddev / std::sqrt(2.0);
  const double re = normal();
  const double im = normal();
  return {scale * re, scale * im};
}

}  // namespace rmt
