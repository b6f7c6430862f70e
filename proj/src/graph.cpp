#include "rmt/graph.hpp"

#include "rmt/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace rmt {

// ---------------------------------------------------------------------------
// CumulantGraph

CumulantGraph::CumulantGraph(int num_vertices, std::vector<Edge> edges)
    : num_vertices_(num_vertices), edges_(std::move(edges)) {
  require(num_vertices_ >= 0, ErrorKind::parameter, "graph: negative vertex count");
  std::vector<bool> used(static_cast<std::size_t>(num_vertices_), false);
  for (const Edge& e : edges_) {
    require(e.source >= 0 && e.source < num_vertices_ && e.target >= 0 && e.target < num_vertices_,
            ErrorKind::parameter, "graph: edge endpoint out of range");
    used[static_cast<std::size_t>(e.source)] = true;
    used[static_cast<std::size_t>(e.target)] = true;
  }
  require(std::all_of(used.begin(), used.end(), [](bool b) { return b; }), ErrorKind::parameter,
          "graph: isolated vertex");
}

std::vector<int> CumulantGraph::component_of_vertices() const {
  std::vector<int> parent(static_cast<std::size_t>(num_vertices_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : edges_) parent[find(e.source)] = find(e.target);
  std::vector<int> id(static_cast<std::size_t>(num_vertices_), -1);
  std::map<int, int> root_id;
  for (int v = 0; v < num_vertices_; ++v) {
    auto [it, inserted] = root_id.try_emplace(find(v), static_cast<int>(root_id.size()));
    id[v] = it->second;
  }
  return id;
}

int CumulantGraph::num_components() const {
  const auto ids = component_of_vertices();
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
}

std::vector<int> CumulantGraph::out_degrees() const {
  std::vector<int> d(static_cast<std::size_t>(num_vertices_), 0);
  for (const Edge& e : edges_) ++d[e.source];
  return d;
}

std::vector<int> CumulantGraph::in_degrees() const {
  std::vector<int> d(static_cast<std::size_t>(num_vertices_), 0);
  for (const Edge& e : edges_) ++d[e.target];
  return d;
}

std::string CumulantGraph::to_text() const {
  std::string out = "v=" + std::to_string(num_vertices_) + ";e=";
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(edges_[i].source) + "->" + std::to_string(edges_[i].target);
  }
  return out;
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorKind::parameter,
          "malformed graph text '" + std::string(whole) + "'");
  return value;
}

}  // namespace

CumulantGraph CumulantGraph::parse(std::string_view text) {
  const std::string_view whole = text;
  auto bad = [&]() { fail(ErrorKind::parameter, "malformed graph text '" + std::string(whole) + "'"); };
  if (text.substr(0, 2) != "v=") bad();
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) bad();
  const int v = parse_int(text.substr(2, semi - 2), whole);
  text = text.substr(semi + 1);
  if (text.substr(0, 2) != "e=") bad();
  text = text.substr(2);
  std::vector<Edge> edges;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto arrow = item.find("->");
    if (arrow == std::string_view::npos) bad();
    edges.push_back({parse_int(item.substr(0, arrow), whole), parse_int(item.substr(arrow + 2), whole)});
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
    if (text.empty()) bad();
  }
  return CumulantGraph(v, std::move(edges));
}

std::pair<CumulantGraph, std::vector<long>> graph_with_indices(std::span<const IndexPair> pairs) {
  std::vector<long> indices;
  auto vertex_of = [&](long index) {
    auto it = std::find(indices.begin(), indices.end(), index);
    if (it != indices.end()) return static_cast<int>(it - indices.begin());
    indices.push_back(index);
    return static_cast<int>(indices.size() - 1);
  };
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const int s = vertex_of(i);
    const int t = vertex_of(j);
    edges.push_back({s, t});
  }
  return {CumulantGraph(static_cast<int>(indices.size()), std::move(edges)), std::move(indices)};
}

CumulantGraph graph_from_monomial(std::span<const IndexPair> pairs) { return graph_with_indices(pairs).first; }

bool is_eulerian(const CumulantGraph& g) { return g.out_degrees() == g.in_degrees(); }

Rational scaling_exponent(const CumulantGraph& g) {
  return Rational(g.num_vertices() - g.num_components()) - Rational(g.num_edges(), 2);
}

CumulantGraph disjoint_union(const CumulantGraph& a, const CumulantGraph& b) {
  std::vector<Edge> edges = a.edges();
  for (const Edge& e : b.edges()) edges.push_back({e.source + a.num_vertices(), e.target + a.num_vertices()});
  return CumulantGraph(a.num_vertices() + b.num_vertices(), std::move(edges));
}

CumulantGraph relabel(const CumulantGraph& g, std::span<const int> perm) {
  require(static_cast<int>(perm.size()) == g.num_vertices(), ErrorKind::shape, "relabel: permutation size");
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const Edge& e : g.edges()) edges.push_back({perm[e.source], perm[e.target]});
  return CumulantGraph(g.num_vertices(), std::move(edges));
}

// ---------------------------------------------------------------------------
// Canonical forms.

namespace {

using EdgeList = std::vector<Edge>;

struct ComponentCanon {
  int num_vertices = 0;
  EdgeList edges;       // canonical, sorted
  std::uint64_t automorphisms = 0;  // vertex permutations fixing the edge multiset
};

// Colour refinement: start from (out, in, loops) and refine by the multisets of
// neighbour colours until stable. Colours are ranks of sorted signatures, so
// they are isomorphism invariant.
std::vector<int> refine_colours(int n, const EdgeList& edges) {
  std::vector<std::vector<int>> sig(static_cast<std::size_t>(n));
  std::vector<int> out(n, 0), in(n, 0), loops(n, 0);
  for (const Edge& e : edges) {
    ++out[e.source];
    ++in[e.target];
    if (e.source == e.target) ++loops[e.source];
  }
  std::vector<int> colour(n, 0);
  auto rank = [&](const std::vector<std::vector<int>>& signatures) {
    std::vector<std::vector<int>> sorted = signatures;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> result(n);
    for (int v = 0; v < n; ++v)
      result[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), signatures[v]) - sorted.begin());
    return std::make_pair(result, static_cast<int>(sorted.size()));
  };
  for (int v = 0; v < n; ++v) sig[v] = {out[v], in[v], loops[v]};
  auto [initial, classes] = rank(sig);
  colour = initial;
  for (int round = 0; round < n; ++round) {
    for (int v = 0; v < n; ++v) {
      std::vector<int> outs, ins;
      for (const Edge& e : edges) {
        if (e.source == v) outs.push_back(colour[e.target]);
        if (e.target == v) ins.push_back(colour[e.source]);
      }
      std::sort(outs.begin(), outs.end());
      std::sort(ins.begin(), ins.end());
      std::vector<int> s{colour[v], -1};
      s.insert(s.end(), outs.begin(), outs.end());
      s.push_back(-2);
      s.insert(s.end(), ins.begin(), ins.end());
      sig[v] = std::move(s);
    }
    auto [next, next_classes] = rank(sig);
    colour = next;
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return colour;
}

// Canonical form of one weakly connected component given in local labels.
ComponentCanon canonicalize_component(int n, const EdgeList& edges) {
  const std::vector<int> colour = refine_colours(n, edges);
  // Vertices grouped by colour; a labeling assigns consecutive new labels to
  // each colour class in colour order, any order inside a class.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return colour[a] < colour[b]; });
  std::vector<std::pair<int, int>> classes;  // [begin, end) in `order`
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && colour[order[j]] == colour[order[i]]) ++j;
    classes.emplace_back(i, j);
    i = j;
  }

  ComponentCanon best;
  best.num_vertices = n;
  bool have_best = false;
  std::uint64_t ties = 0;
  std::vector<int> new_label(n);
  EdgeList candidate(edges.size());

  // Iterate over the product of permutations within classes.
  std::vector<int> arrangement = order;
  auto evaluate = [&]() {
    for (int pos = 0; pos < n; ++pos) new_label[arrangement[pos]] = pos;
    for (std::size_t k = 0; k < edges.size(); ++k)
      candidate[k] = {new_label[edges[k].source], new_label[edges[k].target]};
    std::sort(candidate.begin(), candidate.end());
    if (!have_best || candidate < best.edges) {
      best.edges = candidate;
      have_best = true;
      ties = 1;
    } else if (candidate == best.edges) {
      ++ties;
    }
  };
  // Odometer over classes using std::next_permutation on each class slice.
  for (auto& [b, e] : classes) std::sort(arrangement.begin() + b, arrangement.begin() + e);
  while (true) {
    evaluate();
    std::size_t c = 0;
    for (; c < classes.size(); ++c) {
      auto [b, e] = classes[c];
      if (std::next_permutation(arrangement.begin() + b, arrangement.begin() + e)) break;
      // wrapped around to sorted order; carry into the next class
    }
    if (c == classes.size()) break;
  }
  best.automorphisms = ties;
  return best;
}

struct Decomposition {
  std::vector<ComponentCanon> components;  // sorted canonical order
};

bool component_less(const ComponentCanon& a, const ComponentCanon& b) {
  if (a.num_vertices != b.num_vertices) return a.num_vertices < b.num_vertices;
  if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
  return a.edges < b.edges;
}

bool component_equal(const ComponentCanon& a, const ComponentCanon& b) {
  return a.num_vertices == b.num_vertices && a.edges == b.edges;
}

Decomposition decompose(const CumulantGraph& g) {
  require(g.num_edges() <= kMaxCanonicalEdges, ErrorKind::capacity,
          "canonical form supports at most " + std::to_string(kMaxCanonicalEdges) + " edges");
  const std::vector<int> comp = g.component_of_vertices();
  const int c = g.num_components();
  std::vector<std::vector<int>> members(static_cast<std::size_t>(c));
  for (int v = 0; v < g.num_vertices(); ++v) members[comp[v]].push_back(v);
  Decomposition d;
  for (int k = 0; k < c; ++k) {
    std::vector<int> local(static_cast<std::size_t>(g.num_vertices()), -1);
    for (std::size_t i = 0; i < members[k].size(); ++i) local[members[k][i]] = static_cast<int>(i);
    EdgeList edges;
    for (const Edge& e : g.edges())
      if (comp[e.source] == k) edges.push_back({local[e.source], local[e.target]});
    d.components.push_back(canonicalize_component(static_cast<int>(members[k].size()), edges));
  }
  std::sort(d.components.begin(), d.components.end(), component_less);
  return d;
}

std::uint64_t factorial(int k) {
  std::uint64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

}  // namespace

CumulantGraph canonical_graph(const CumulantGraph& g) {
  const Decomposition d = decompose(g);
  int offset = 0;
  std::vector<Edge> edges;
  for (const auto& comp : d.components) {
    for (const Edge& e : comp.edges) edges.push_back({e.source + offset, e.target + offset});
    offset += comp.num_vertices;
  }
  return CumulantGraph(offset, std::move(edges));
}

std::string canonical_form(const CumulantGraph& g) { return canonical_graph(g).to_text(); }

std::uint64_t aut_order(const CumulantGraph& g) {
  const Decomposition d = decompose(g);
  std::uint64_t order = 1;
  for (std::size_t i = 0; i < d.components.size();) {
    std::size_t j = i;
    while (j < d.components.size() && component_equal(d.components[i], d.components[j])) ++j;
    const int copies = static_cast<int>(j - i);
    for (int k = 0; k < copies; ++k) order *= d.components[i].automorphisms;
    order *= factorial(copies);
    i = j;
  }
  std::map<Edge, int> multiplicity;
  for (const Edge& e : g.edges()) ++multiplicity[e];
  for (const auto& [edge, m] : multiplicity) order *= factorial(m);
  return order;
}

std::vector<CumulantGraph> enumerate_graphs(int max_edges) {
  require(max_edges <= kMaxEnumeratedEdges, ErrorKind::capacity,
          "enumerate_graphs supports at most " + std::to_string(kMaxEnumeratedEdges) + " edges");
  std::vector<CumulantGraph> result;
  if (max_edges < 1) return result;
  // Removing an edge from a graph with e edges (and dropping any vertex left
  // isolated) gives one with e-1 edges, so growing by one edge at a time,
  // attached to old or fresh vertices, reaches every class.
  std::set<std::string> level_labels{CumulantGraph().to_text()};
  std::vector<CumulantGraph> level{CumulantGraph()};
  for (int e = 1; e <= max_edges; ++e) {
    std::map<std::string, CumulantGraph> next;
    for (const CumulantGraph& g : level) {
      const int v = g.num_vertices();
      for (int s = 0; s < v + 2; ++s) {
        for (int t = 0; t < v + 2; ++t) {
          // fresh vertices are v and v+1; only use v+1 when v is also used
          const int fresh = (s >= v) + (t >= v && t != s);
          const int max_index = std::max(s, t);
          if (max_index >= v + fresh) continue;
          std::vector<Edge> edges = g.edges();
          edges.push_back({s, t});
          CumulantGraph grown(v + fresh, std::move(edges));
          CumulantGraph canon = canonical_graph(grown);
          std::string label = canon.to_text();
          next.emplace(std::move(label), std::move(canon));
        }
      }
    }
    level.clear();
    for (auto& [label, graph] : next) {
      result.push_back(graph);
      level.push_back(std::move(graph));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Bound classification.

BoundClassification bound_requirement(const CumulantGraph& g) {
  return {g,
          is_eulerian(g) ? BoundRequirement::eulerian_vanishing_required
                         : BoundRequirement::non_eulerian_bounded_required,
          scaling_exponent(g)};
}

std::string to_string(BoundVerdict verdict) {
  switch (verdict) {
    case BoundVerdict::consistent_vanishing:
      return "consistent_vanishing";
    case BoundVerdict::consistent_bounded:
      return "consistent_bounded";
    default:
      return "violating";
  }
}

BoundVerdict classify_bound(const CumulantGraph& g, std::span<const ScanPoint> values,
                            const BoundThresholds& thresholds) {
  require(values.size() >= 3, ErrorKind::parameter, "classify_bound needs at least 3 values of N");
  for (std::size_t i = 1; i < values.size(); ++i)
    require(values[i].n > values[i - 1].n, ErrorKind::parameter, "classify_bound: N must be ascending");

  const double exponent = to_double(scaling_exponent(g));
  std::vector<double> scaled, scaled_err;
  for (const ScanPoint& p : values) {
    const double factor = std::pow(p.n, exponent);
    scaled.push_back(std::abs(p.value) * factor);
    scaled_err.push_back(std::abs(p.stderr_) * factor);
  }
  const double first = scaled.front();
  const double last = scaled.back();
  const bool last_unresolved =
      last <= std::max(thresholds.noise_sigmas * scaled_err.back(), thresholds.zero_tolerance);

  if (is_eulerian(g)) {
    if (last_unresolved) return BoundVerdict::consistent_vanishing;
    const bool decreasing = last <= (1.0 - thresholds.min_decrease) * first;
    const bool small = last < thresholds.tau_factor * first;
    return decreasing && small ? BoundVerdict::consistent_vanishing : BoundVerdict::violating;
  }
  if (last_unresolved) return BoundVerdict::consistent_bounded;
  return last <= thresholds.max_growth * first ? BoundVerdict::consistent_bounded : BoundVerdict::violating;
}

}  // namespace rmt
