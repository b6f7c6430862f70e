#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace rmt {

/// Identifies one reproducible random stream: (seed, stream) always yields the
/// same sequence, on every platform.
struct RngHandle {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngHandle&, const RngHandle&) = default;
};

/// Child handle for a sub-task. Keeps the seed and folds `index` into the
/// stream id, so workers never share generator state.
RngHandle derive(RngHandle parent, std::uint64_t index);

std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** seeded from the handle through splitmix64.
///
/// Constants are the published ones (Blackman & Vigna): splitmix64 increment
/// 0x9E3779B97F4A7C15 with multipliers 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB,
/// xoshiro256** output `rotl(s1 * 5, 7) * 9`. Doubles take the top 53 bits.
/// Normals use the Marsaglia polar method; the first accepted pair returns
/// u*f now and caches v*f for the next call.
class Rng {
 public:
  explicit Rng(RngHandle handle);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on (0, 1), never exactly 0.
  double uniform_open();

  /// Uniform integer on [0, bound), bound > 0 (Lemire rejection).
  std::uint64_t below(std::uint64_t bound);

  double normal();

  /// +1 or -1 with equal probability.
  double rademacher();

  /// Complex Gaussian with independent parts, each of variance stddev^2 / 2.
  /// Throws a parameter error for stddev <= 0.
  std::complex<double> gaussian_complex(double stddev);

  RngHandle handle() const { return handle_; }

 private:
  RngHandle handle_;
  std::array<std::uint64_t, 4> state_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

inline std::complex<double> gaussian_complex(Rng& rng, double stddev) { return rng.gaussian_complex(stddev); }

}  // namespace rmt
