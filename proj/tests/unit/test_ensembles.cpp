#include "doctest.h"
#include "rmt/detail/quartic_chain.hpp"
#include "rmt/ensembles.hpp"
#include "rmt/error.hpp"
#include "rmt/partitions.hpp"

#include <cmath>

using namespace rmt;
using nlohmann::json;

namespace {

EnsembleSpec common_factor_spec(EnsembleKind kind = EnsembleKind::common_factor, double alpha = 0.0) {
  EnsembleSpec s;
  s.kind = kind;
  s.factor_dist = {{Rational(1, 2), Rational(1, 2)}, {Rational(3, 2), Rational(1, 2)}};
  s.damping_alpha = alpha;
  return s;
}

const CumulantGraph two_two_cycles(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});

}  // namespace

TEST_CASE("gue off-diagonal second moment") {
  EnsembleSpec gue;
  double sum = 0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) sum += std::norm(sample(gue, 64, {1, std::uint64_t(k)})(0, 1));
  CHECK(sum / draws >= 0.97);
  CHECK(sum / draws <= 1.03);
}

TEST_CASE("rademacher support") {
  EnsembleSpec s;
  s.kind = EnsembleKind::wigner;
  s.entry_dist = EntryDist::rademacher;
  s.sigma = 2.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto h = sample(s, 2, {3, k});
    CHECK(std::abs(std::abs(h(0, 1).real()) - 2.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(std::abs(h(0, 1).imag()) - 2.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(std::abs(h(0, 0).real()) - 2.0) < 1e-15);
  }
}

TEST_CASE("wigner entries are uncorrelated") {
  EnsembleSpec s;
  s.kind = EnsembleKind::wigner;
  s.entry_dist = EntryDist::centered_exponential;
  const int draws = 20000;
  double sxy = 0, sx2 = 0, sy2 = 0;
  for (int k = 0; k < draws; ++k) {
    const auto h = sample(s, 3, {8, std::uint64_t(k)});
    const double x = h(0, 1).real(), y = h(1, 2).real();
    sxy += x * y;
    sx2 += x * x;
    sy2 += y * y;
  }
  const double se = std::sqrt(sx2 / draws * sy2 / draws / draws);
  CHECK(std::abs(sxy / draws) <= 5 * se);
}

TEST_CASE("common factor moments") {
  const auto s = common_factor_spec();
  CHECK(s.factor_moment(2) == 1);
  CHECK(s.factor_moment(4) == Rational(5, 4));
}

TEST_CASE("entry moments") {
  CHECK(entry_moment(EntryDist::gaussian, 4) == 3);
  CHECK(entry_moment(EntryDist::gaussian, 6) == 15);
  CHECK(entry_moment(EntryDist::uniform, 2) == 1);
  CHECK(entry_moment(EntryDist::uniform, 4) == Rational(9, 5));
  CHECK(entry_moment(EntryDist::centered_exponential, 2) == 1);
  CHECK(entry_moment(EntryDist::centered_exponential, 3) == 2);
  CHECK(entry_moment(EntryDist::centered_exponential, 4) == 9);
  for (auto d : {EntryDist::gaussian, EntryDist::rademacher, EntryDist::uniform, EntryDist::centered_exponential}) {
    CHECK(entry_moment(d, 1) == 0);
    CHECK(entry_moment(d, 2) == 1);
  }
}

TEST_CASE("oracle: Gaussian pair cumulant and vanishing higher orders") {
  EnsembleSpec gue;
  gue.sigma = 1.5;
  std::vector<long> ij = {4, 9};
  auto v = entry_cumulant_oracle(gue, CumulantGraph(2, {{0, 1}, {1, 0}}), ij);
  REQUIRE(v);
  CHECK(v->at_unit_scale() == ExactComplex(1));
  CHECK(std::abs(v->evaluate(1.5, 100, 0) - std::complex<double>(2.25)) < 1e-12);
  std::vector<long> ijk = {1, 2, 3};
  auto three = entry_cumulant_oracle(gue, CumulantGraph(3, {{0, 1}, {1, 2}, {2, 0}}), ijk);
  REQUIRE(three);
  CHECK(three->value.is_zero());
  std::vector<long> ii = {2};
  auto diag = entry_cumulant_oracle(gue, CumulantGraph(1, {{0, 0}, {0, 0}}), ii);
  REQUIRE(diag);
  CHECK(diag->at_unit_scale() == ExactComplex(1));
}

TEST_CASE("oracle agrees with the Gaussian cumulant function") {
  EnsembleSpec gue;
  const auto c = gaussian_cumulants(1);
  for (const auto& g : enumerate_graphs(4)) {
    std::vector<long> idx;
    for (int v = 0; v < g.num_vertices(); ++v) idx.push_back(10 + 3 * v);
    const auto o = entry_cumulant_oracle(gue, g, idx);
    REQUIRE(o);
    if (o->inverse_sqrt2_power % 2) {
      CHECK(o->value.is_zero());
      CHECK(c.evaluate(g, idx, 50) == 0);
    } else {
      CHECK(o->at_unit_scale() == ExactComplex(c.evaluate(g, idx, 50)));
    }
  }
}

TEST_CASE("oracle: common factor violates the Eulerian bound") {
  std::vector<long> idx = {0, 1, 2, 3};
  const auto v = entry_cumulant_oracle(common_factor_spec(), two_two_cycles, idx);
  REQUIRE(v);
  CHECK(v->at_unit_scale() == ExactComplex(Rational(1, 4)));
  // Same number from the partition calculus over the exact moments.
  const auto s = common_factor_spec();
  MomentFunction m = [&](std::span<const IndexPair> sub) -> Rational {
    // Product of W-moments (Gaussian pairs) times E[g^k].
    const Rational w = moments_from_cumulants(gaussian_cumulants(1), sub, 4);
    return sub.size() % 2 ? Rational(0) : w * s.factor_moment(static_cast<int>(sub.size()));
  };
  std::vector<IndexPair> pairs = {{0, 1}, {1, 0}, {2, 3}, {3, 2}};
  CHECK(cumulants_from_moments(m, pairs) == Rational(1, 4));
}

TEST_CASE("oracle: damped factor scales as N^-alpha") {
  std::vector<long> idx = {0, 1, 2, 3};
  const auto v = entry_cumulant_oracle(common_factor_spec(EnsembleKind::damped_common_factor, 1.0), two_two_cycles, idx);
  REQUIRE(v);
  for (double n : {32.0, 64.0, 1000.0}) CHECK(std::abs(v->evaluate(1, n, 1) - 0.25 / n) < 1e-14);
}

TEST_CASE("oracle: skewed entries and unavailable cases") {
  EnsembleSpec s;
  s.kind = EnsembleKind::wigner;
  s.entry_dist = EntryDist::centered_exponential;
  std::vector<long> i = {5};
  const auto k3 = entry_cumulant_oracle(s, CumulantGraph(1, {{0, 0}, {0, 0}, {0, 0}}), i);
  REQUIRE(k3);
  CHECK(k3->at_unit_scale() == ExactComplex(2));
  EnsembleSpec q;
  q.kind = EnsembleKind::quartic_invariant;
  CHECK_FALSE(entry_cumulant_oracle(q, CumulantGraph(1, {{0, 0}}), i));
  std::vector<long> i1 = {0};
  CHECK_FALSE(entry_cumulant_oracle(s, CumulantGraph(1, std::vector<Edge>(5, {0, 0})), i1));
  auto cf = common_factor_spec();
  cf.entry_dist = EntryDist::centered_exponential;
  CHECK_FALSE(entry_cumulant_oracle(cf, CumulantGraph(1, {{0, 0}, {0, 0}, {0, 0}}), i));
}

TEST_CASE("spec json round trip and strictness") {
  const auto s = common_factor_spec();
  const auto back = EnsembleSpec::from_json(s.to_json());
  CHECK(back.to_json() == s.to_json());
  CHECK(spec_hash(back) == spec_hash(s));
  CHECK(spec_hash(s).size() == 16);
  EnsembleSpec other = s;
  other.sigma = 2;
  CHECK(spec_hash(other) != spec_hash(s));

  auto expect_error = [](const json& j, const std::string& needle) {
    try {
      EnsembleSpec::from_json(j);
      FAIL("accepted invalid spec");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parameter);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error({{"kind", "goe"}}, "ensemble.kind");
  expect_error({{"kind", "gue"}, {"colour", 1}}, "ensemble.colour");
  expect_error({{"kind", "gue"}, {"sigma", -1}}, "ensemble.sigma");
  expect_error({{"kind", "common_factor"}, {"factor_dist", {{{"g_squared", "2"}, {"weight", 1}}}}}, "E[g^2]");
  expect_error({{"kind", "common_factor"}}, "factor_dist");
  expect_error({{"kind", "quartic_invariant"}, {"metropolis", {{"steps", 0}}}}, "metropolis.steps");
}

TEST_CASE("samples are reproducible") {
  const auto s = common_factor_spec();
  const auto a = sample(s, 16, {99, 4});
  const auto b = sample(s, 16, {99, 4});
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

TEST_CASE("quartic chain tracks its action exactly") {
  Rng rng({5, 5});
  detail::QuarticChain chain(12, 1.0, 0.3, rng);
  for (int s = 0; s < 20; ++s) chain.sweep(rng, 0.7);
  CHECK(std::abs(chain.action() - chain.recomputed_action()) < 1e-8 * std::abs(chain.recomputed_action()));
}

TEST_CASE("quartic chain at g = 0 reproduces GUE second moments") {
  EnsembleSpec q;
  q.kind = EnsembleKind::quartic_invariant;
  q.metropolis = {50, 5, 0.5};
  const std::size_t n = 16, count = 200;
  const auto states = sample_chain(q, n, {12, 0}, count);
  double sum = 0, sum2 = 0;
  for (const auto& st : states) {
    const double m2 = st.matrix.trace_of_square() / double(n * n);
    sum += m2;
    sum2 += m2 * m2;
  }
  const double mean = sum / count;
  const double se = std::sqrt((sum2 / count - mean * mean) / count);
  // Thinned chain states are close to independent; allow 5 se plus slack for correlation.
  CHECK(std::abs(mean - 1.0) <= 5 * se * 2);
  REQUIRE(states.front().diagnostics.acceptance_rate);
  CHECK(*states.front().diagnostics.acceptance_rate > 0.3);
  CHECK(*states.front().diagnostics.acceptance_rate < 0.7);
  CHECK(states.front().diagnostics.warnings.empty());
}
