#include "doctest.h"
#include "rmt/cumulant_scan.hpp"
#include "rmt/error.hpp"

#include <cmath>

using namespace rmt;

namespace {

EnsembleSpec common_factor_spec(EnsembleKind kind = EnsembleKind::common_factor, double alpha = 0.0) {
  EnsembleSpec s;
  s.kind = kind;
  s.factor_dist = {{Rational(1, 2), Rational(1, 2)}, {Rational(3, 2), Rational(1, 2)}};
  s.damping_alpha = alpha;
  return s;
}

const CumulantGraph two_two_cycles(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});
const CumulantGraph two_cycle(2, {{0, 1}, {1, 0}});
const CumulantGraph double_two_cycle(2, {{0, 1}, {1, 0}, {0, 1}, {1, 0}});

void check_against_oracle(const EnsembleSpec& spec, const CumulantGraph& g, std::size_t n, std::size_t samples) {
  std::vector<long> idx;
  for (int v = 0; v < g.num_vertices(); ++v) idx.push_back(v);
  const auto oracle = entry_cumulant_oracle(spec, g, idx);
  REQUIRE(oracle);
  const auto expect = oracle->evaluate(spec.sigma, static_cast<double>(n), spec.damping_alpha);
  const auto est = estimate_entry_cumulant(spec, g, n, samples, {7, 0});
  INFO(g.to_text() << " est " << est.value.real() << " +- " << est.stderr_ << " oracle " << expect.real());
  CHECK(est.stderr_ > 0);
  CHECK(std::abs(est.value.real() - expect.real()) <= 5 * est.stderr_);
}

}  // namespace

TEST_CASE("estimates agree with analytic cumulants") {
  EnsembleSpec gue;
  gue.sigma = 1.5;
  check_against_oracle(gue, two_cycle, 16, 400);
  check_against_oracle(gue, double_two_cycle, 16, 400);
  check_against_oracle(common_factor_spec(), two_two_cycles, 16, 3000);
  EnsembleSpec rad;
  rad.kind = EnsembleKind::wigner;
  rad.entry_dist = EntryDist::rademacher;
  check_against_oracle(rad, double_two_cycle, 16, 400);
  EnsembleSpec expo;
  expo.kind = EnsembleKind::wigner;
  expo.entry_dist = EntryDist::centered_exponential;
  check_against_oracle(expo, double_two_cycle, 16, 800);
}

TEST_CASE("scan verdicts") {
  const std::vector<std::size_t> grid = {8, 16, 32};
  const std::vector<CumulantGraph> graphs = {two_two_cycles};
  const auto cf = cumulant_scan(common_factor_spec(), graphs, grid, 1500, {3, 0});
  REQUIRE(cf.size() == 3);
  for (const auto& r : cf) {
    CHECK(r.verdict == BoundVerdict::violating);
    CHECK(std::abs(r.scaled_estimate - 0.25) <= 5 * r.stderr_);
  }
  EnsembleSpec gue;
  const auto g = cumulant_scan(gue, graphs, grid, 300, {3, 0});
  for (const auto& r : g) CHECK(r.verdict == BoundVerdict::consistent_vanishing);
}

TEST_CASE("scan errors") {
  EnsembleSpec gue;
  const std::vector<CumulantGraph> big = {CumulantGraph(1, {{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}})};
  const std::vector<std::size_t> grid = {4, 8, 16};
  CHECK_THROWS_AS(cumulant_scan(gue, big, grid, 10, {}), Error);
  const std::vector<CumulantGraph> ok = {two_cycle};
  const std::vector<std::size_t> short_grid = {4, 8};
  CHECK_THROWS_AS(cumulant_scan(gue, ok, short_grid, 10, {}), Error);
  CHECK_THROWS_AS(estimate_entry_cumulant(gue, two_two_cycles, 3, 10, {}), Error);
}

TEST_CASE("same seed, same estimate") {
  EnsembleSpec gue;
  const auto a = estimate_entry_cumulant(gue, two_cycle, 12, 50, {9, 0}, 1);
  const auto b = estimate_entry_cumulant(gue, two_cycle, 12, 50, {9, 0}, 3);
  CHECK(a.value == b.value);
  CHECK(a.stderr_ == b.stderr_);
}
