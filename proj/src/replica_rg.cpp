#include "rmt/replica_rg.hpp"

#include "rmt/error.hpp"
#include "rmt/json_util.hpp"
#include "rmt/partitions.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace rmt::rg {

using nlohmann::json;

std::string to_string(Basis b) { return b == Basis::free_sum_basis ? "free_sum_basis" : "distinct_index_basis"; }

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::gaussian:
      return "gaussian";
    case BoundKind::eulerian_perturbation:
      return "eulerian_perturbation";
    case BoundKind::non_eulerian_perturbation:
      return "non_eulerian_perturbation";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Canonical labels, cached by raw edge list.

class Canonicalizer {
 public:
  const std::pair<std::string, CumulantGraph>& operator()(const CumulantGraph& g) {
    auto edges = g.edges();
    std::sort(edges.begin(), edges.end());
    std::string key = std::to_string(g.num_vertices()) + ":";
    for (const auto& e : edges) key += std::to_string(e.source) + "," + std::to_string(e.target) + ";";
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      CumulantGraph c = canonical_graph(g);
      std::string label = c.to_text();
      it = cache_.emplace(std::move(key), std::make_pair(std::move(label), std::move(c))).first;
    }
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::pair<std::string, CumulantGraph>> cache_;
};

struct Contraction {
  int num_vertices = 0;
  std::vector<Edge> edges;
  int n_power = 0;
  int isolated = 0;  // free index sums left without edges: factor N each
};

// d/dX on the out-half of e1 and d/dXbar on the in-half of e2, summed over
// the shared index i and replica a.
Contraction contract(int nv, const std::vector<Edge>& edges, int e1, int e2) {
  Contraction c;
  int keep, gone;
  if (e1 == e2) {
    c.n_power = 1;
    keep = edges[e1].source;
    gone = edges[e1].target;
    for (int k = 0; k < static_cast<int>(edges.size()); ++k)
      if (k != e1) c.edges.push_back(edges[k]);
  } else {
    keep = edges[e1].source;
    gone = edges[e2].target;
    for (int k = 0; k < static_cast<int>(edges.size()); ++k)
      if (k != e1 && k != e2) c.edges.push_back(edges[k]);
    c.edges.push_back({edges[e2].source, edges[e1].target});
  }
  std::vector<int> id(static_cast<std::size_t>(nv), -1);
  for (auto& e : c.edges) {
    if (e.source == gone) e.source = keep;
    if (e.target == gone) e.target = keep;
  }
  int next = 0;
  for (auto& e : c.edges) {
    if (id[e.source] < 0) id[e.source] = next++;
    if (id[e.target] < 0) id[e.target] = next++;
    e.source = id[e.source];
    e.target = id[e.target];
  }
  const int surviving = (keep == gone) ? nv : nv - 1;
  c.isolated = surviving - next;
  c.num_vertices = next;
  return c;
}

RingElement factor_of(int n_power, int isolated) { return RingElement::monomial(1, n_power, 2 * isolated); }

using Table = std::map<std::string, RingElement>;

struct Derivative {
  Table table;
  RingElement vacuum;
};

struct GraphTerm {
  const CumulantGraph* graph;
  const std::string* label;
  const RingElement* coeff;
};

// Engine state shared across orders of one computation.
class Engine {
 public:
  Engine(const FlowOptions& options) : options_(options) {}

  Canonicalizer canon;
  std::map<std::string, CumulantGraph> graphs;  // label -> canonical graph
  std::set<std::tuple<int, int, std::string>> ledger;

  bool beyond_horizon(int t_order, int edges) const {
    return options_.horizon && t_order + edges - 1 > *options_.horizon;
  }

  const Derivative& loop(const CumulantGraph& g, const std::string& label) {
    auto it = loop_cache_.find(label);
    if (it != loop_cache_.end()) return it->second;
    Derivative d;
    const int e = g.num_edges();
    for (int a = 0; a < e; ++a)
      for (int b = 0; b < e; ++b) accumulate(contract(g.num_vertices(), g.edges(), a, b), RingElement(1), d);
    return loop_cache_.emplace(label, std::move(d)).first->second;
  }

  const Derivative& tree(const CumulantGraph& g1, const std::string& l1, const CumulantGraph& g2,
                         const std::string& l2) {
    const auto key = std::make_pair(l1, l2);
    auto it = tree_cache_.find(key);
    if (it != tree_cache_.end()) return it->second;
    Derivative d;
    const CumulantGraph u = disjoint_union(g1, g2);
    for (int a = 0; a < g1.num_edges(); ++a)
      for (int b = 0; b < g2.num_edges(); ++b)
        accumulate(contract(u.num_vertices(), u.edges(), a, g1.num_edges() + b), RingElement(1), d);
    return tree_cache_.emplace(key, std::move(d)).first->second;
  }

  void accumulate(const Contraction& c, const RingElement& weight, Derivative& d) {
    const RingElement w = weight * factor_of(c.n_power, c.isolated);
    if (c.edges.empty()) {
      d.vacuum += w;
      return;
    }
    const auto& [label, graph] = canon(CumulantGraph(c.num_vertices, c.edges));
    graphs.try_emplace(label, graph);
    d.table[label] += w;
  }

  // Coefficient of t^k of the flow right-hand side; outputs belong to t-order k + 1.
  Derivative rhs_at(const std::vector<std::vector<GraphTerm>>& by_order, int k) {
    Derivative out;
    for (const auto& term : by_order[k]) {
      const int e = term.graph->num_edges();
      if (beyond_horizon(k + 1, e - 1)) continue;
      const auto& d = loop(*term.graph, *term.label);
      for (const auto& [label, value] : d.table) out.table[label] += *term.coeff * value;
      out.vacuum += *term.coeff * d.vacuum;
    }
    for (int i = 0; i <= k; ++i) tree_into(by_order[i], by_order[k - i], k + 1, out);
    return out;
  }

  void tree_into(const std::vector<GraphTerm>& left, const std::vector<GraphTerm>& right, int out_order,
                 Derivative& out) {
    for (const auto& a : left)
      for (const auto& b : right) {
        const int e = a.graph->num_edges() + b.graph->num_edges() - 1;
        if (beyond_horizon(out_order, e)) continue;
        if (e > options_.max_edges) {
          ledger.emplace(out_order, e, *a.label + " x " + *b.label);
          continue;
        }
        const auto& d = tree(*a.graph, *a.label, *b.graph, *b.label);
        const RingElement w = *a.coeff * *b.coeff;
        for (const auto& [label, value] : d.table) out.table[label] += w * value;
      }
  }

  const FlowOptions& options() const { return options_; }

 private:
  FlowOptions options_;
  std::unordered_map<std::string, Derivative> loop_cache_;
  std::map<std::pair<std::string, std::string>, Derivative> tree_cache_;
};

std::vector<std::vector<GraphTerm>> terms_by_order(const FlowState& s, int max_order) {
  std::vector<std::vector<GraphTerm>> out(static_cast<std::size_t>(max_order + 1));
  for (const auto& [label, series] : s.table)
    for (int k = 0; k <= max_order && k < static_cast<int>(series.coeffs.size()); ++k)
      if (!series.coeffs[k].is_zero()) out[k].push_back({&series.graph, &label, &series.coeffs[k]});
  return out;
}

void store_ledger(const Engine& engine, FlowState& s) {
  std::set<TruncationEntry, decltype([](const TruncationEntry& a, const TruncationEntry& b) {
             return std::tie(a.t_order, a.edges, a.graph) < std::tie(b.t_order, b.edges, b.graph);
           })>
      merged(s.ledger.begin(), s.ledger.end());
  for (const auto& [order, edges, graph] : engine.ledger) merged.insert({graph, order, edges});
  s.ledger.assign(merged.begin(), merged.end());
}

void check_options(const FlowOptions& o) {
  require(o.max_edges >= 1 && o.max_edges <= kMaxFlowEdges, ErrorKind::capacity,
          "max_edges must be in [1, " + std::to_string(kMaxFlowEdges) + "]");
  require(!o.horizon || *o.horizon >= 0, ErrorKind::parameter, "horizon must be >= 0");
}

// f_{G/pi} += mu(pi) * value for every vertex partition pi (distinct -> free),
// or d_{G/pi} += value (free -> distinct).
template <class Sink>
void for_each_quotient(const CumulantGraph& g, Canonicalizer& canon, bool with_moebius, Sink&& sink) {
  require(g.num_vertices() <= kMaxPartitionSize, ErrorKind::capacity,
          "basis conversion supports graphs with at most " + std::to_string(kMaxPartitionSize) + " vertices");
  for (const SetPartition& p : set_partitions(g.num_vertices())) {
    std::vector<int> block_of(static_cast<std::size_t>(g.num_vertices()));
    BigInt mu = 1;
    for (int b = 0; b < p.num_blocks(); ++b) {
      for (int v : p.blocks[b]) block_of[v] = b;
      if (with_moebius) mu *= moebius_weight(static_cast<int>(p.blocks[b].size()));
    }
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) edges.push_back({block_of[e.source], block_of[e.target]});
    const auto& [label, graph] = canon(CumulantGraph(p.num_blocks(), edges));
    sink(label, graph, Rational(mu));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// CumulantSpec.

void CumulantSpec::add(const CumulantGraph& g, const RingElement& value, bool gaussian) {
  require(g.num_edges() >= 1, ErrorKind::parameter, "cumulant spec: graph needs at least one edge");
  const CumulantGraph c = canonical_graph(g);
  const std::string label = c.to_text();
  auto [it, inserted] = entries.try_emplace(label, Entry{c, value, gaussian});
  if (!inserted) {
    require(it->second.gaussian == gaussian, ErrorKind::parameter,
            "cumulant spec: graph " + label + " listed as both gaussian and perturbation");
    it->second.value += value;
  }
}

CumulantSpec CumulantSpec::gaussian_part() const {
  CumulantSpec out;
  for (const auto& [label, e] : entries)
    if (e.gaussian) out.entries.emplace(label, e);
  return out;
}

CumulantSpec CumulantSpec::from_json(const json& j, const std::string& path) {
  using namespace json_util;
  require(j.is_array(), ErrorKind::parameter, path + ": expected an array");
  CumulantSpec spec;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    reject_unknown(j[i], {"graph", "value", "N_half_power", "gaussian"}, at);
    CumulantGraph g;
    try {
      g = CumulantGraph::parse(get_string(j[i], "graph", at, ""));
    } catch (const Error& e) {
      fail(ErrorKind::parameter, at + ".graph: " + e.what());
    }
    const Rational value = get_rational(j[i], "value", at);
    const long half = get_integer(j[i], "N_half_power", at, 0);
    bool gaussian = false;
    if (j[i].contains("gaussian")) {
      require(j[i].at("gaussian").is_boolean(), ErrorKind::parameter, at + ".gaussian: expected a boolean");
      gaussian = j[i].at("gaussian").get<bool>();
    }
    spec.add(g, RingElement::monomial(value, 0, static_cast<int>(half)), gaussian);
  }
  return spec;
}

CumulantSpec gaussian_cumulant_spec(const Rational& sigma_squared) {
  CumulantSpec s;
  s.add(CumulantGraph(2, {{0, 1}, {1, 0}}), RingElement(sigma_squared), true);
  s.add(CumulantGraph(1, {{0, 0}, {0, 0}}), RingElement(sigma_squared), true);
  return s;
}

// ---------------------------------------------------------------------------
// FlowState.

RingElement FlowState::coefficient(const std::string& label, int k) const {
  auto it = table.find(label);
  if (it == table.end() || k >= static_cast<int>(it->second.coeffs.size())) return {};
  return it->second.coeffs[k];
}

void FlowState::add(const CumulantGraph& canonical, const std::string& label, int k, const RingElement& value) {
  auto& s = table.try_emplace(label, Series{canonical, {}}).first->second;
  if (static_cast<int>(s.coeffs.size()) < order + 1) s.coeffs.resize(static_cast<std::size_t>(order + 1));
  s.coeffs[k] += value;
}

void FlowState::prune_zeros() {
  std::erase_if(table, [](const auto& kv) {
    return std::all_of(kv.second.coeffs.begin(), kv.second.coeffs.end(),
                       [](const RingElement& r) { return r.is_zero(); });
  });
}

bool FlowState::truncated() const {
  return std::any_of(ledger.begin(), ledger.end(), [&](const TruncationEntry& e) { return e.t_order <= order; });
}

bool FlowState::cell_exact(int k, int edges) const {
  const int d = k + edges - 1;
  if (options.horizon && d > *options.horizon) return false;
  for (const auto& e : ledger)
    if (k >= e.t_order && d >= e.t_order + e.edges - 1) return false;
  return true;
}

bool FlowState::same_values(const FlowState& other) const {
  auto padded = [](std::vector<RingElement> v, std::size_t n) {
    v.resize(std::max(v.size(), n));
    return v;
  };
  std::set<std::string> labels;
  for (const auto& [l, s] : table) labels.insert(l);
  for (const auto& [l, s] : other.table) labels.insert(l);
  const std::size_t n = static_cast<std::size_t>(std::max(order, other.order) + 1);
  for (const auto& l : labels) {
    std::vector<RingElement> a, b;
    if (auto it = table.find(l); it != table.end()) a = it->second.coeffs;
    if (auto it = other.table.find(l); it != other.table.end()) b = it->second.coeffs;
    if (padded(a, n) != padded(b, n)) return false;
  }
  return padded(vacuum, n) == padded(other.vacuum, n);
}

namespace {

json ring_to_json(const RingElement& r) {
  json terms = json::array();
  for (const auto& [k, c] : r.terms())
    terms.push_back({numerator(c).str(), denominator(c).str(), k.first, k.second});
  return terms;
}

RingElement ring_from_json(const json& j, const std::string& path) {
  require(j.is_array(), ErrorKind::parameter, path + ": expected an array of terms");
  RingElement r;
  for (const auto& t : j) {
    require(t.is_array() && t.size() == 4 && t[0].is_string() && t[1].is_string() && t[2].is_number_integer() &&
                t[3].is_number_integer(),
            ErrorKind::parameter, path + ": term must be [num, den, a, b]");
    const Rational c(BigInt(t[0].get<std::string>()), BigInt(t[1].get<std::string>()));
    r += RingElement::monomial(c, t[2].get<int>(), t[3].get<int>());
  }
  return r;
}

}  // namespace

json FlowState::to_json() const {
  json graphs_json = json::object();
  for (const auto& [label, s] : table) {
    json coeffs = json::array();
    for (const auto& c : s.coeffs) coeffs.push_back(ring_to_json(c));
    graphs_json[label] = coeffs;
  }
  json vac = json::array();
  for (const auto& c : vacuum) vac.push_back(ring_to_json(c));
  json led = json::array();
  for (const auto& e : ledger) led.push_back({{"graph", e.graph}, {"t_order", e.t_order}, {"edges", e.edges}});
  json j = {{"schema", "rmt-flow/1"},
            {"order", order},
            {"basis", to_string(basis)},
            {"max_edges", options.max_edges},
            {"horizon", options.horizon ? json(*options.horizon) : json(nullptr)},
            {"truncated", truncated()},
            {"vacuum", vac},
            {"graphs", graphs_json},
            {"truncation_ledger", led}};
  return j;
}

FlowState FlowState::from_json(const json& j) {
  using namespace json_util;
  reject_unknown(j, {"schema", "order", "basis", "max_edges", "horizon", "truncated", "vacuum", "graphs",
                     "truncation_ledger"},
                 "flow");
  require(get_string(j, "schema", "flow", "") == "rmt-flow/1", ErrorKind::parameter,
          "flow.schema: expected rmt-flow/1");
  FlowState s;
  s.order = static_cast<int>(get_integer(j, "order", "flow", 0));
  const std::string basis = get_string(j, "basis", "flow", "free_sum_basis");
  require(basis == "free_sum_basis" || basis == "distinct_index_basis", ErrorKind::parameter,
          "flow.basis: unknown value '" + basis + "'");
  s.basis = basis == "free_sum_basis" ? Basis::free_sum_basis : Basis::distinct_index_basis;
  s.options.max_edges = static_cast<int>(get_integer(j, "max_edges", "flow", 6));
  if (j.contains("horizon") && !j.at("horizon").is_null()) s.options.horizon = static_cast<int>(get_integer(j, "horizon", "flow", 0));
  if (j.contains("vacuum"))
    for (std::size_t k = 0; k < j.at("vacuum").size(); ++k)
      s.vacuum.push_back(ring_from_json(j.at("vacuum")[k], "flow.vacuum[" + std::to_string(k) + "]"));
  if (j.contains("graphs")) {
    require(j.at("graphs").is_object(), ErrorKind::parameter, "flow.graphs: expected an object");
    for (const auto& [label, coeffs] : j.at("graphs").items()) {
      const CumulantGraph g = CumulantGraph::parse(label);
      const CumulantGraph c = canonical_graph(g);
      require(c == g, ErrorKind::parameter, "flow.graphs: label '" + label + "' is not canonical");
      Series series{c, {}};
      for (std::size_t k = 0; k < coeffs.size(); ++k)
        series.coeffs.push_back(ring_from_json(coeffs[k], "flow.graphs." + label));
      s.table.emplace(label, std::move(series));
    }
  }
  if (j.contains("truncation_ledger"))
    for (const auto& e : j.at("truncation_ledger")) {
      reject_unknown(e, {"graph", "t_order", "edges"}, "flow.truncation_ledger[]");
      s.ledger.push_back({e.at("graph").get<std::string>(), e.at("t_order").get<int>(), e.at("edges").get<int>()});
    }
  return s;
}

// ---------------------------------------------------------------------------
// Flow.

FlowState initial_potential(const CumulantSpec& spec, const FlowOptions& options) {
  check_options(options);
  FlowState s;
  s.options = options;
  s.vacuum.resize(1);
  Canonicalizer canon;
  for (const auto& [label, entry] : spec.entries) {
    const CumulantGraph& g = entry.graph;
    require(g.num_edges() <= options.max_edges, ErrorKind::capacity,
            "initial_potential: graph " + label + " exceeds max_edges = " + std::to_string(options.max_edges));
    const RingElement d = entry.value * RingElement::monomial(Rational(1, static_cast<long>(aut_order(g))), 0,
                                                                -g.num_edges());
    for_each_quotient(g, canon, true, [&](const std::string& l, const CumulantGraph& q, const Rational& mu) {
      s.add(q, l, 0, RingElement(mu) * d);
    });
  }
  s.prune_zeros();
  return s;
}

FlowState rg_derivative(const FlowState& state) {
  require(state.basis == Basis::free_sum_basis, ErrorKind::parameter, "rg_derivative: state must use free sums");
  Engine engine(state.options);
  const auto by_order = terms_by_order(state, state.order);
  FlowState out;
  out.order = state.order;
  out.options = state.options;
  out.vacuum.resize(static_cast<std::size_t>(state.order + 1));
  for (int k = 0; k <= state.order; ++k) {
    Derivative d = engine.rhs_at(by_order, k);
    for (const auto& [label, value] : d.table) out.add(engine.graphs.at(label), label, k, value);
    out.vacuum[k] = d.vacuum;
  }
  out.prune_zeros();
  out.ledger = state.ledger;
  store_ledger(engine, out);
  return out;
}

FlowState linearized_derivative(const FlowState& v, const FlowState& w) {
  require(v.basis == Basis::free_sum_basis && w.basis == Basis::free_sum_basis, ErrorKind::parameter,
          "linearized_derivative: states must use free sums");
  const int order = std::min(v.order, w.order);
  FlowOptions opts = v.options;
  opts.horizon.reset();  // both inputs are already cut; keep every product
  Engine engine(opts);
  const auto vt = terms_by_order(v, order);
  const auto wt = terms_by_order(w, order);
  FlowState out;
  out.order = order;
  out.options = v.options;
  out.vacuum.resize(static_cast<std::size_t>(order + 1));
  for (int k = 0; k <= order; ++k) {
    Derivative d;
    for (const auto& term : wt[k]) {
      const auto& l = engine.loop(*term.graph, *term.label);
      for (const auto& [label, value] : l.table) d.table[label] += *term.coeff * value;
      d.vacuum += *term.coeff * l.vacuum;
    }
    for (int i = 0; i <= k; ++i) {
      engine.tree_into(vt[i], wt[k - i], k + 1, d);
      engine.tree_into(wt[i], vt[k - i], k + 1, d);
    }
    for (const auto& [label, value] : d.table) out.add(engine.graphs.at(label), label, k, value);
    out.vacuum[k] = d.vacuum;
  }
  out.prune_zeros();
  store_ledger(engine, out);
  return out;
}

FlowState integrate_flow(const FlowState& state0, int k_max) {
  require(k_max >= 0, ErrorKind::parameter, "integrate_flow: order must be >= 0");
  require(k_max <= kMaxFlowOrder, ErrorKind::capacity,
          "integrate_flow supports orders up to " + std::to_string(kMaxFlowOrder));
  require(state0.basis == Basis::free_sum_basis, ErrorKind::parameter, "integrate_flow: state must use free sums");
  check_options(state0.options);
  FlowState s;
  s.order = k_max;
  s.options = state0.options;
  s.vacuum.assign(static_cast<std::size_t>(k_max + 1), RingElement());
  if (!state0.vacuum.empty()) s.vacuum[0] = state0.vacuum[0];
  for (const auto& [label, series] : state0.table)
    if (!series.coeffs.empty() && !series.coeffs[0].is_zero()) s.add(series.graph, label, 0, series.coeffs[0]);

  Engine engine(s.options);
  for (int k = 0; k < k_max; ++k) {
    const auto by_order = terms_by_order(s, k);
    Derivative d = engine.rhs_at(by_order, k);
    const RingElement scale(Rational(1, k + 1));
    for (const auto& [label, value] : d.table) {
      if (value.is_zero()) continue;
      s.add(engine.graphs.at(label), label, k + 1, scale * value);
    }
    s.vacuum[k + 1] = scale * d.vacuum;
  }
  s.prune_zeros();
  store_ledger(engine, s);
  return s;
}

// ---------------------------------------------------------------------------
// Wick oracle.

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

FlowState wick_oracle(const CumulantSpec& spec, int k_max, const FlowOptions& options) {
  require(k_max >= 0, ErrorKind::parameter, "wick_oracle: order must be >= 0");
  require(k_max <= 3, ErrorKind::capacity, "wick_oracle supports orders up to 3");
  const FlowState v0 = initial_potential(spec, options);
  FlowState out;
  out.order = k_max;
  out.options = options;
  out.vacuum.assign(static_cast<std::size_t>(k_max + 1), RingElement());
  out.vacuum[0] = v0.vacuum.empty() ? RingElement() : v0.vacuum[0];
  for (const auto& [label, series] : v0.table) out.add(series.graph, label, 0, series.coeffs[0]);

  struct Term {
    CumulantGraph graph;
    RingElement coeff;
  };
  std::vector<Term> terms;
  for (const auto& [label, series] : v0.table) terms.push_back({series.graph, series.coeffs[0]});
  if (terms.empty()) return out;

  Canonicalizer canon;
  std::set<std::tuple<int, int, std::string>> ledger;
  BigInt factorial = 1;
  for (int m = 1; m <= k_max + 1; ++m) {
    factorial *= m;
    const RingElement inv_m(Rational(BigInt(1), factorial));
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);
    while (true) {
      // Disjoint union of the factors, with the factor of each edge.
      int nv = 0;
      std::vector<Edge> edges;
      std::vector<int> factor_of_edge;
      RingElement weight = inv_m;
      for (int f = 0; f < m; ++f) {
        const Term& t = terms[tuple[f]];
        for (const auto& e : t.graph.edges()) {
          edges.push_back({e.source + nv, e.target + nv});
          factor_of_edge.push_back(f);
        }
        nv += t.graph.num_vertices();
        weight *= t.coeff;
      }
      const int e_total = static_cast<int>(edges.size());

      for (int k = std::max(1, m - 1); k <= std::min(k_max, e_total); ++k) {
        const int e_out = e_total - k;
        if (options.horizon && e_out > 0 && k + e_out - 1 > *options.horizon) continue;
        if (e_out > options.max_edges) {
          ledger.emplace(k, e_out, "wick(m=" + std::to_string(m) + ")");
          continue;
        }
        // Partial matchings: out-half of edge o paired with in-half of edge i.
        std::vector<int> partner_in(static_cast<std::size_t>(e_total), -1);  // o -> i
        std::vector<char> in_used(static_cast<std::size_t>(e_total), 0);
        auto evaluate = [&]() {
          UnionFind factors(m);
          for (int o = 0; o < e_total; ++o)
            if (partner_in[o] >= 0) factors.unite(factor_of_edge[o], factor_of_edge[partner_in[o]]);
          for (int f = 1; f < m; ++f)
            if (factors.find(f) != factors.find(0)) return;
          // next[i] = o when out(o) is paired with in(i).
          std::vector<int> next(static_cast<std::size_t>(e_total), -1);
          UnionFind verts(nv);
          for (int o = 0; o < e_total; ++o)
            if (partner_in[o] >= 0) {
              next[partner_in[o]] = o;
              verts.unite(edges[o].source, edges[partner_in[o]].target);
            }
          std::vector<char> out_contracted(static_cast<std::size_t>(e_total), 0), seen(static_cast<std::size_t>(e_total), 0);
          for (int o = 0; o < e_total; ++o)
            if (partner_in[o] >= 0) out_contracted[o] = 1;
          std::vector<Edge> result;
          for (int f = 0; f < e_total; ++f) {
            if (out_contracted[f]) continue;
            int g = f;
            seen[g] = 1;
            while (next[g] >= 0) {
              g = next[g];
              seen[g] = 1;
            }
            result.push_back({verts.find(edges[f].source), verts.find(edges[g].target)});
          }
          int cycles = 0;
          for (int f = 0; f < e_total; ++f) {
            if (seen[f]) continue;
            ++cycles;
            int g = f;
            while (!seen[g]) {
              seen[g] = 1;
              g = next[g];
            }
          }
          std::vector<int> id(static_cast<std::size_t>(nv), -1);
          int used = 0;
          for (auto& e : result) {
            if (id[e.source] < 0) id[e.source] = used++;
            if (id[e.target] < 0) id[e.target] = used++;
            e.source = id[e.source];
            e.target = id[e.target];
          }
          int classes = 0;
          for (int v = 0; v < nv; ++v)
            if (verts.find(v) == v) ++classes;
          const RingElement w = weight * factor_of(cycles, classes - used);
          if (result.empty()) {
            out.vacuum[k] += w;
            return;
          }
          const auto& [label, graph] = canon(CumulantGraph(used, result));
          out.add(graph, label, k, w);
        };
        // Choose k out-halves in increasing order, each paired with an unused in-half.
        auto rec = [&](auto&& self, int from, int remaining) -> void {
          if (remaining == 0) {
            evaluate();
            return;
          }
          for (int o = from; o <= e_total - remaining; ++o)
            for (int i = 0; i < e_total; ++i) {
              if (in_used[i]) continue;
              in_used[i] = 1;
              partner_in[o] = i;
              self(self, o + 1, remaining - 1);
              partner_in[o] = -1;
              in_used[i] = 0;
            }
        };
        rec(rec, 0, k);
      }

      int pos = m - 1;
      while (pos >= 0 && ++tuple[pos] == static_cast<int>(terms.size())) tuple[pos--] = 0;
      if (pos < 0) break;
    }
  }
  out.prune_zeros();
  for (const auto& [order, edges, graph] : ledger) out.ledger.push_back({graph, order, edges});
  return out;
}

// ---------------------------------------------------------------------------
// Basis conversion, resolvent, bounds.

FlowState to_distinct_basis(const FlowState& state) {
  require(state.basis == Basis::free_sum_basis, ErrorKind::parameter, "to_distinct_basis: state already distinct");
  FlowState out;
  out.order = state.order;
  out.options = state.options;
  out.basis = Basis::distinct_index_basis;
  out.vacuum = state.vacuum;
  out.ledger = state.ledger;
  Canonicalizer canon;
  for (const auto& [label, series] : state.table)
    for_each_quotient(series.graph, canon, false, [&](const std::string& l, const CumulantGraph& q, const Rational&) {
      for (int k = 0; k < static_cast<int>(series.coeffs.size()); ++k)
        if (!series.coeffs[k].is_zero()) out.add(q, l, k, series.coeffs[k]);
    });
  out.prune_zeros();
  return out;
}

std::vector<Rational> extract_resolvent(const FlowState& state, int k) {
  require(k >= 1, ErrorKind::parameter, "extract_resolvent: need at least one coefficient");
  require(state.basis == Basis::free_sum_basis, ErrorKind::parameter, "extract_resolvent: state must use free sums");
  require(state.order >= k - 2, ErrorKind::parameter,
          "extract_resolvent: state integrated to order " + std::to_string(state.order) + ", need " +
              std::to_string(k - 2));
  const std::string self_loop = canonical_form(CumulantGraph(1, {{0, 0}}));
  const std::string edge = canonical_form(CumulantGraph(2, {{0, 1}}));
  std::vector<Rational> out = {1};
  for (int m = 2; m <= k; ++m) {
    const int j = m - 2;
    require(state.cell_exact(j, 1), ErrorKind::capacity,
            "extract_resolvent: self-loop coefficient at t^" + std::to_string(j) + " is affected by truncation");
    const RingElement d = (state.coefficient(self_loop, j) + state.coefficient(edge, j)).n_grade(0);
    if (!d.is_zero())
      require(d.max_half_n_power() <= 0, ErrorKind::invariant,
              "extract_resolvent: positive power of N in the n^0 self-loop series at t^" + std::to_string(j) + ": " +
                  d.to_string());
    out.push_back(d.coefficient(0, 0));
  }
  return out;
}

bool BoundsReport::all_ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const BoundEntry& e) { return e.ok; });
}

BoundsReport check_bounds_flow(const FlowState& state, const CumulantSpec& spec) {
  require(state.basis == Basis::free_sum_basis, ErrorKind::parameter, "check_bounds_flow: state must use free sums");
  const FlowState gauss_free = integrate_flow(initial_potential(spec.gaussian_part(), state.options), state.order);
  const FlowState full = to_distinct_basis(state);
  const FlowState gauss = to_distinct_basis(gauss_free);

  std::map<std::string, CumulantGraph> labels;
  for (const auto& [l, s] : full.table) labels.emplace(l, s.graph);
  for (const auto& [l, s] : gauss.table) labels.emplace(l, s.graph);

  BoundsReport report;
  for (const auto& [label, g] : labels) {
    const int shift = 2 * (g.num_vertices() - g.num_components());
    const bool eulerian = is_eulerian(g);
    for (int k = 0; k <= state.order; ++k) {
      if (!full.cell_exact(k, g.num_edges()) || !gauss_free.cell_exact(k, g.num_edges())) continue;
      const RingElement c_gauss = gauss.coefficient(label, k);
      const RingElement c_pert = full.coefficient(label, k) - c_gauss;
      auto check = [&](const RingElement& c, BoundKind kind) {
        if (c.is_zero()) return;
        auto violates = [&](int half) {
          return kind == BoundKind::eulerian_perturbation ? half >= 0 : half > 0;
        };
        std::set<int> n_powers;
        for (const auto& [key, coeff] : c.terms()) n_powers.insert(key.first);
        for (int a : n_powers) {
          const int half = c.n_grade(a).max_half_n_power() + shift;
          if (a == 0)
            report.entries.push_back({label, k, kind, half, !violates(half)});
          else if (violates(half))
            report.higher_n_violations.push_back({label, k, a, half});
        }
      };
      check(c_gauss, BoundKind::gaussian);
      check(c_pert, eulerian ? BoundKind::eulerian_perturbation : BoundKind::non_eulerian_perturbation);
    }
  }
  return report;
}

}  // namespace rmt::rg
