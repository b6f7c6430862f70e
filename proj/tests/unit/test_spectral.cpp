#include "doctest.h"
#include "rmt/error.hpp"
#include "rmt/semicircle.hpp"
#include "rmt/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace rmt;

namespace {

// Inverse semicircle CDF by bisection.
double semicircle_quantile(double p) {
  double lo = -2, hi = 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (semicircle::cdf(mid, {1}) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("scale_spectrum") {
  std::vector<double> z = {0, 0, 0, 0};
  CHECK(scale_spectrum(z, 4).eigs_scaled == z);
  std::vector<double> e = {2, -2};
  CHECK_THROWS_AS(scale_spectrum(e, 4), Error);
  const auto s = scale_spectrum(std::vector<double>{2, -2, 0, 0}, 4);
  CHECK(s.eigs_scaled == std::vector<double>{-1, 0, 0, 1});
  const auto id = scale_spectrum(eigenvalues_hermitian(HermitianMatrix::identity(9)), 9);
  for (double x : id.eigs_scaled) CHECK(x == doctest::Approx(1.0 / 3));
}

TEST_CASE("esd_moment") {
  SpectrumSample s{3, {-1, 0, 1}, {}};
  CHECK(esd_moment(s, 2) == doctest::Approx(2.0 / 3));
  CHECK(esd_moment(s, 0) == 1);
  CHECK_THROWS_AS(esd_moment(s, 13), Error);
  EnsembleSpec gue;
  const auto h = sample(gue, 40, {4, 4});
  const auto sp = scale_spectrum(eigenvalues_hermitian(h), 40);
  CHECK(std::abs(esd_moment(sp, 2) - h.trace_of_square() / 1600.0) <= 1e-8 * esd_moment(sp, 2));
}

TEST_CASE("histogram") {
  std::vector<double> one = {0};
  const auto h1 = histogram(one, 1, -1, 1);
  CHECK(h1[0].first == 0);
  CHECK(h1[0].second == doctest::Approx(0.5));
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(-2 + 4.0 * i / 99);
  for (const auto& [c, d] : histogram(grid, 4, -2, 2)) CHECK(d == doctest::Approx(0.25));
  std::vector<double> partial = {-5, 0, 0.5, 7};
  double mass = 0;
  for (const auto& [c, d] : histogram(partial, 10, -1, 1)) {
    CHECK(d >= 0);
    mass += d * 0.2;
  }
  CHECK(mass <= 1 + 1e-9);
  CHECK(mass == doctest::Approx(0.5));
  std::vector<double> none;
  CHECK_THROWS_AS(histogram(none, 4, -1, 1), Error);
  CHECK_THROWS_AS(histogram(one, 0, -1, 1), Error);
  CHECK_THROWS_AS(histogram(one, 4, 1, -1), Error);
}

TEST_CASE("ks distance") {
  std::vector<double> q;
  for (int i = 1; i <= 100; ++i) q.push_back(semicircle_quantile((i - 0.5) / 100));
  CHECK(ks_distance_to_semicircle(q, 1) <= 0.01);
  std::vector<double> zeros(10, 0.0);
  CHECK(ks_distance_to_semicircle(zeros, 1) == doctest::Approx(0.5));
  SpectrumSample s{5, {-1.5, -0.2, 0.1, 0.3, 1.9}, {}};
  std::vector<SpectrumSample> one = {s}, three = {s, s, s};
  CHECK(ks_distance_to_semicircle(one, 1) == ks_distance_to_semicircle(three, 1));
}

TEST_CASE("parallel_for is deterministic and propagates errors") {
  std::vector<int> out(1000);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i % 97));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { require(i != 7, ErrorKind::numerical, "x"); }, 3), Error);
}

TEST_CASE("sample_spectra does not depend on thread count") {
  EnsembleSpec gue;
  const auto a = sample_spectra(gue, 20, 6, {17, 0}, nullptr, 1);
  const auto b = sample_spectra(gue, 20, 6, {17, 0}, nullptr, 3);
  for (std::size_t s = 0; s < 6; ++s) CHECK(a[s].eigs_scaled == b[s].eigs_scaled);
}

TEST_CASE("GUE fourth moment and histogram at large N") {
  EnsembleSpec gue;
  const auto s1024 = sample_spectra(gue, 1024, 20, {2, 0});
  std::vector<int> ks = {4};
  const auto rows = moment_rows(s1024, ks, 1);
  CHECK(rows[0].mean >= 1.9);
  CHECK(rows[0].mean <= 2.1);

  const auto s1000 = sample_spectra(gue, 1000, 20, {3, 0});
  double worst = 0;
  for (const auto& [c, d] : histogram(s1000, 50, -2.5, 2.5))
    worst = std::max(worst, std::abs(d - semicircle::density(c, {1})));
  CHECK(worst <= 0.05);
}

TEST_CASE("convergence scan") {
  EnsembleSpec gue;
  std::vector<std::size_t> grid = {16, 32};
  std::vector<int> ks = {2, 3};
  const auto rows = convergence_scan(gue, grid, ks, 30, {6, 0});
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    if (r.k == 3) {
      CHECK(std::abs(r.mean) <= 5 * r.stderr_);
      CHECK(r.gap == std::abs(r.mean));
    }
  }
  std::vector<std::size_t> bad = {32, 16};
  CHECK_THROWS_AS(convergence_scan(gue, bad, ks, 2, {6, 0}), Error);
}
