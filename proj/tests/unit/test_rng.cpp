#include "doctest.h"
#include "rmt/error.hpp"
#include "rmt/rng.hpp"

#include <cmath>

using namespace rmt;

TEST_CASE("same handle gives bit-identical sequences") {
  Rng a({42, 0}), b({42, 0});
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c({42, 0}), d({42, 0});
  const auto z1 = c.gaussian_complex(1.0), z2 = c.gaussian_complex(1.0);
  CHECK(z1 != z2);
  CHECK(d.gaussian_complex(1.0) == z1);
  CHECK(d.gaussian_complex(1.0) == z2);
}

TEST_CASE("splitmix64 reference values") {
  // First outputs of the published splitmix64 from state 0.
  std::uint64_t s = 0;
  CHECK(splitmix64(s) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(s) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("gaussian_complex variance per component") {
  Rng rng({7, 3});
  const int n = 1000000;
  double s = 0, s2 = 0, si2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.gaussian_complex(1.0);
    s += z.real();
    s2 += z.real() * z.real();
    si2 += z.imag() * z.imag();
  }
  CHECK(s2 / n >= 0.49);
  CHECK(s2 / n <= 0.51);
  CHECK(si2 / n >= 0.49);
  CHECK(si2 / n <= 0.51);
  CHECK(std::abs(s / n) < 5.0 * std::sqrt(0.5 / n));
  CHECK_THROWS_AS(rng.gaussian_complex(0.0), Error);
  CHECK_THROWS_AS(rng.gaussian_complex(-1.0), Error);
}

TEST_CASE("derived streams are decorrelated") {
  const RngHandle root{11, 0};
  Rng a(derive(root, 0)), b(derive(root, 1));
  CHECK(derive(root, 0) != derive(root, 1));
  const int n = 200000;
  double sab = 0;
  for (int i = 0; i < n; ++i) sab += a.normal() * b.normal();
  CHECK(std::abs(sab / n) < 5.0 / std::sqrt(n));
}

TEST_CASE("uniform and below stay in range") {
  Rng rng({1, 1});
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.uniform_open() > 0.0);
    CHECK(rng.below(7) < 7);
  }
}
