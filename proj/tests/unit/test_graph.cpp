#include "doctest.h"
#include "rmt/error.hpp"
#include "rmt/graph.hpp"
#include "rmt/rng.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

using namespace rmt;

namespace {

std::vector<Edge> sorted_edges(const CumulantGraph& g) {
  auto e = g.edges();
  std::sort(e.begin(), e.end());
  return e;
}

// Brute force: does some vertex permutation map a's edge multiset onto b's?
bool isomorphic_brute(const CumulantGraph& a, const CumulantGraph& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges()) return false;
  std::vector<int> p(a.num_vertices());
  std::iota(p.begin(), p.end(), 0);
  const auto target = sorted_edges(b);
  do {
    std::vector<Edge> mapped;
    for (const auto& e : a.edges()) mapped.push_back({p[e.source], p[e.target]});
    std::sort(mapped.begin(), mapped.end());
    if (mapped == target) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

// Vertex automorphisms times edge permutations within parallel classes.
std::uint64_t aut_brute(const CumulantGraph& g) {
  std::vector<int> p(g.num_vertices());
  std::iota(p.begin(), p.end(), 0);
  const auto target = sorted_edges(g);
  std::uint64_t count = 0;
  do {
    std::vector<Edge> mapped;
    for (const auto& e : g.edges()) mapped.push_back({p[e.source], p[e.target]});
    std::sort(mapped.begin(), mapped.end());
    if (mapped == target) ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  std::map<Edge, int> mult;
  for (const auto& e : g.edges()) ++mult[e];
  for (const auto& [e, m] : mult)
    for (int k = 2; k <= m; ++k) count *= k;
  return count;
}

// All digraphs with exactly e edges on exactly v vertices, none isolated.
std::vector<CumulantGraph> all_graphs(int v, int e) {
  std::vector<CumulantGraph> out;
  std::vector<Edge> cur;
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(cur.size()) == e) {
      std::vector<int> deg(v, 0);
      for (const auto& x : cur) ++deg[x.source], ++deg[x.target];
      if (std::all_of(deg.begin(), deg.end(), [](int d) { return d > 0; })) out.emplace_back(v, cur);
      return;
    }
    for (int k = from; k < v * v; ++k) {
      cur.push_back({k / v, k % v});
      rec(k);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::size_t count_classes_brute(const std::vector<CumulantGraph>& graphs) {
  std::vector<CumulantGraph> reps;
  for (const auto& g : graphs) {
    bool found = false;
    for (const auto& r : reps)
      if (isomorphic_brute(g, r)) {
        found = true;
        break;
      }
    if (!found) reps.push_back(g);
  }
  return reps.size();
}

// Edge-disjoint cycle decomposition by backtracking: repeatedly remove a
// closed directed walk starting at the lowest remaining edge.
bool has_cycle_decomposition(std::vector<Edge> edges) {
  if (edges.empty()) return true;
  const int start = edges.front().source;
  std::function<bool(int, std::vector<Edge>&, std::vector<bool>&)> walk = [&](int at, std::vector<Edge>& es,
                                                                             std::vector<bool>& used) -> bool {
    for (std::size_t k = 0; k < es.size(); ++k) {
      if (used[k] || es[k].source != at) continue;
      used[k] = true;
      if (es[k].target == start) {
        std::vector<Edge> rest;
        for (std::size_t j = 0; j < es.size(); ++j)
          if (!used[j]) rest.push_back(es[j]);
        if (has_cycle_decomposition(rest)) return true;
      }
      if (walk(es[k].target, es, used)) return true;
      used[k] = false;
    }
    return false;
  };
  std::vector<bool> used(edges.size(), false);
  return walk(start, edges, used);
}

CumulantGraph random_relabel(const CumulantGraph& g, Rng& rng) {
  std::vector<int> p(g.num_vertices());
  std::iota(p.begin(), p.end(), 0);
  for (int i = g.num_vertices() - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
  auto r = relabel(g, p);
  auto e = r.edges();
  for (int i = static_cast<int>(e.size()) - 1; i > 0; --i) std::swap(e[i], e[rng.below(i + 1)]);
  return CumulantGraph(r.num_vertices(), e);
}

const CumulantGraph two_cycle(2, {{0, 1}, {1, 0}});
const CumulantGraph self_loop(1, {{0, 0}});
const CumulantGraph double_edge(2, {{0, 1}, {0, 1}});
const CumulantGraph two_two_cycles(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});

}  // namespace

TEST_CASE("graph_from_monomial") {
  std::vector<IndexPair> p1 = {{5, 9}, {9, 5}};
  CHECK(graph_from_monomial(p1) == two_cycle);
  std::vector<IndexPair> p2 = {{3, 3}};
  CHECK(graph_from_monomial(p2) == self_loop);
  std::vector<IndexPair> p3 = {{1, 2}, {1, 2}, {2, 3}, {4, 4}};
  const auto g = graph_from_monomial(p3);
  CHECK(g.num_vertices() == 4);
  CHECK(g.num_edges() == 4);
  CHECK(g.num_components() == 2);
  CHECK_FALSE(is_eulerian(g));
}

TEST_CASE("Eulerian status and scaling exponent") {
  CHECK(is_eulerian(CumulantGraph(2, {{0, 1}, {1, 0}, {0, 1}, {1, 0}})));
  CHECK(is_eulerian(self_loop));
  CHECK(scaling_exponent(two_cycle) == 0);
  CHECK(scaling_exponent(self_loop) == Rational(-1, 2));
  // v=3, e=4, c=2
  CHECK(scaling_exponent(CumulantGraph(3, {{0, 1}, {0, 1}, {1, 0}, {2, 2}})) == -1);
  CHECK(scaling_exponent(disjoint_union(two_cycle, self_loop)) ==
        scaling_exponent(two_cycle) + scaling_exponent(self_loop));
}

TEST_CASE("text round trip and validation") {
  CHECK(two_cycle.to_text() == "v=2;e=0->1,1->0");
  CHECK(CumulantGraph::parse("v=2;e=0->1,1->0") == two_cycle);
  CHECK(CumulantGraph::parse("v=1;e=0->0") == self_loop);
  CHECK(CumulantGraph::parse("v=0;e=") == CumulantGraph());
  CHECK_THROWS_AS(CumulantGraph::parse("v=2;e=0->0"), Error);  // isolated vertex 1
  CHECK_THROWS_AS(CumulantGraph::parse("v=1;e=0->1"), Error);
  CHECK_THROWS_AS(CumulantGraph::parse("nonsense"), Error);
}

TEST_CASE("canonical form separates and identifies") {
  CHECK(canonical_form(two_cycle) == canonical_form(CumulantGraph(2, {{1, 0}, {0, 1}})));
  CHECK(canonical_form(two_cycle) != canonical_form(double_edge));
  CHECK_THROWS_AS(canonical_form(CumulantGraph(1, std::vector<Edge>(9, {0, 0}))), Error);
}

TEST_CASE("canonical form agrees with brute-force isomorphism on 3-edge graphs") {
  for (int v = 1; v <= 3; ++v) {
    const auto graphs = all_graphs(v, 3);
    std::map<std::string, int> labels;
    for (const auto& g : graphs) labels[canonical_form(g)] = 1;
    CHECK(labels.size() == count_classes_brute(graphs));
  }
}

TEST_CASE("canonical form is invariant under random relabeling") {
  Rng rng({2024, 0});
  const auto reps = enumerate_graphs(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& g = reps[rng.below(reps.size())];
    CHECK(canonical_form(random_relabel(g, rng)) == canonical_form(g));
  }
}

TEST_CASE("automorphism orders") {
  CHECK(aut_order(self_loop) == 1);
  CHECK(aut_order(double_edge) == 2);
  CHECK(aut_order(two_two_cycles) == 8);
  CHECK(aut_order(two_cycle) == 2);
  CHECK(aut_order(CumulantGraph(1, {{0, 0}, {0, 0}})) == 2);
  for (const auto& g : enumerate_graphs(4)) {
    CHECK(aut_order(g) == aut_brute(g));
  }
  const CumulantGraph path(3, {{0, 1}, {1, 2}});
  CHECK(aut_order(disjoint_union(double_edge, path)) == aut_order(double_edge) * aut_order(path));
}

TEST_CASE("enumerate_graphs") {
  const auto one = enumerate_graphs(1);
  REQUIRE(one.size() == 2);
  CHECK(canonical_form(one[0]) != canonical_form(one[1]));
  for (int e = 1; e <= 3; ++e) {
    std::size_t brute = 0;
    for (int v = 1; v <= 2 * e; ++v) brute += count_classes_brute(all_graphs(v, e));
    std::size_t ours = 0;
    for (const auto& g : enumerate_graphs(3))
      if (g.num_edges() == e) ++ours;
    CHECK(ours == brute);
  }
  for (const auto& g : enumerate_graphs(4)) {
    for (int d : [&] {
           std::vector<int> deg(g.num_vertices(), 0);
           for (const auto& x : g.edges()) ++deg[x.source], ++deg[x.target];
           return deg;
         }())
      CHECK(d > 0);
  }
  CHECK_THROWS_AS(enumerate_graphs(7), Error);
}

TEST_CASE("Eulerian test matches cycle decomposition search") {
  for (const auto& g : enumerate_graphs(4)) CHECK(is_eulerian(g) == has_cycle_decomposition(g.edges()));
}

TEST_CASE("classify_bound") {
  std::vector<ScanPoint> flat = {{32, 0.25, 0.01}, {64, 0.25, 0.01}, {128, 0.25, 0.01}};
  CHECK(classify_bound(two_two_cycles, flat) == BoundVerdict::violating);
  std::vector<ScanPoint> decay = {{10, 0.25, 0}, {100, 0.025, 0}, {1000, 0.0025, 0}};
  CHECK(classify_bound(two_two_cycles, decay) == BoundVerdict::consistent_vanishing);
  std::vector<ScanPoint> zero = {{10, 0, 0}, {20, 0, 0}, {40, 0, 0}};
  CHECK(classify_bound(two_two_cycles, zero) == BoundVerdict::consistent_vanishing);
  CHECK(classify_bound(double_edge, flat) == BoundVerdict::consistent_bounded);
  std::vector<ScanPoint> grow = {{10, 1, 0}, {20, 2, 0}, {40, 4, 0}};
  CHECK(classify_bound(double_edge, grow) == BoundVerdict::violating);
  std::vector<ScanPoint> noisy = {{32, 0.01, 0.01}, {64, -0.02, 0.01}, {128, 0.005, 0.01}};
  CHECK(classify_bound(two_two_cycles, noisy) == BoundVerdict::consistent_vanishing);
  std::vector<ScanPoint> two = {{10, 1, 0}, {20, 1, 0}};
  CHECK_THROWS_AS(classify_bound(two_cycle, two), Error);
  CHECK(bound_requirement(two_two_cycles).requirement == BoundRequirement::eulerian_vanishing_required);
}
