#pragma once

// Directed multigraphs encoding joint cumulants of matrix entries: one vertex
// per distinct matrix index, one edge i -> j per factor M_ij.

#include "rmt/exact.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rmt {

struct Edge {
  int source = 0;
  int target = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Largest edge count accepted by canonical_form / aut_order.
inline constexpr int kMaxCanonicalEdges = 8;
/// Largest edge count accepted by enumerate_graphs.
inline constexpr int kMaxEnumeratedEdges = 6;

class CumulantGraph {
 public:
  /// The empty graph (no vertices, no edges).
  CumulantGraph() = default;

  /// Every endpoint must be < num_vertices and every vertex must carry at
  /// least one edge.
  CumulantGraph(int num_vertices, std::vector<Edge> edges);

  int num_vertices() const noexcept { return num_vertices_; }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Weakly connected components.
  int num_components() const;
  /// Component id per vertex, ids numbered in first-vertex order.
  std::vector<int> component_of_vertices() const;

  std::vector<int> out_degrees() const;
  std::vector<int> in_degrees() const;

  /// `v=<n>;e=<s1>-><t1>,<s2>-><t2>,...` with edges in stored order.
  std::string to_text() const;
  static CumulantGraph parse(std::string_view text);

  friend bool operator==(const CumulantGraph&, const CumulantGraph&) = default;

 private:
  int num_vertices_ = 0;
  std::vector<Edge> edges_;
};

using IndexPair = std::pair<long, long>;

/// Vertices are the distinct indices in first-appearance order; one edge per
/// pair. Returns the graph and the matrix index carried by each vertex.
std::pair<CumulantGraph, std::vector<long>> graph_with_indices(std::span<const IndexPair> pairs);
CumulantGraph graph_from_monomial(std::span<const IndexPair> pairs);

/// In-degree equals out-degree at every vertex.
bool is_eulerian(const CumulantGraph& g);

/// v(G) - c(G) - e(G)/2.
Rational scaling_exponent(const CumulantGraph& g);

/// Canonical representative of the isomorphism class (vertex relabelings that
/// preserve the directed edge multiset). Capacity error above 8 edges.
CumulantGraph canonical_graph(const CumulantGraph& g);

/// Text form of canonical_graph; equal iff isomorphic.
std::string canonical_form(const CumulantGraph& g);

/// |Aut(G)| = (#vertex permutations fixing the edge multiset) * prod over
/// parallel-edge classes of multiplicity!.
std::uint64_t aut_order(const CumulantGraph& g);

/// One canonical representative per isomorphism class with 1..max_edges
/// edges, ordered by edge count then label. Capacity error above 6.
std::vector<CumulantGraph> enumerate_graphs(int max_edges);

CumulantGraph disjoint_union(const CumulantGraph& a, const CumulantGraph& b);

/// Applies vertex relabeling `perm` (old -> new); edge order is kept.
CumulantGraph relabel(const CumulantGraph& g, std::span<const int> perm);

// ---------------------------------------------------------------------------
// Scaling-bound classification.

enum class BoundRequirement { eulerian_vanishing_required, non_eulerian_bounded_required };

struct BoundClassification {
  CumulantGraph graph;
  BoundRequirement requirement;
  Rational exponent;
};

BoundClassification bound_requirement(const CumulantGraph& g);

enum class BoundVerdict { consistent_vanishing, consistent_bounded, violating };

std::string to_string(BoundVerdict verdict);

/// One point of an N-scan. `value` is the raw cumulant estimate; `stderr_`
/// is its Monte Carlo standard error (0 for exact values).
struct ScanPoint {
  double n = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Finite-N trend heuristics. These are tuning knobs, not derived constants.
struct BoundThresholds {
  double min_decrease = 0.2;   // Eulerian: last <= (1 - min_decrease) * first
  double tau_factor = 0.1;     // Eulerian: last < tau_factor * first
  double max_growth = 1.5;     // non-Eulerian: last <= max_growth * first
  double noise_sigmas = 3.0;   // |value| <= noise_sigmas * stderr counts as unresolved
  double zero_tolerance = 1e-12;
};

/// Scales each value by N^exponent and classifies the trend. A last point
/// statistically indistinguishable from zero satisfies either requirement.
/// Parameter error for fewer than 3 points or non-ascending N.
BoundVerdict classify_bound(const CumulantGraph& g, std::span<const ScanPoint> values,
                            const BoundThresholds& thresholds = {});

}  // namespace rmt
