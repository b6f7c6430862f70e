#pragma once

// Exact symbolic flow of the replica effective potential
//
//   dV/dt = sum_{i,a} (d^2 V / dX_ia dXbar_ia + dV/dX_ia dV/dXbar_ia)
//
// expanded over graph monomials m_G(X) = sum_{free i} prod_e (X X^dagger)_{i_s(e) i_t(e)}.
// Coefficients are formal power series in t with RingElement entries.

#include "rmt/graph.hpp"
#include "rmt/ring.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rmt::rg {

enum class Basis { free_sum_basis, distinct_index_basis };
std::string to_string(Basis b);

inline constexpr int kMaxFlowOrder = 8;
inline constexpr int kMaxFlowEdges = 8;

/// Initial cumulant data: graph label -> C_G(0), homogeneous in indices.
struct CumulantSpec {
  struct Entry {
    CumulantGraph graph;  // canonical
    RingElement value;
    bool gaussian = false;
  };
  std::map<std::string, Entry> entries;

  /// Adds (or accumulates into) the entry for the class of `g`.
  void add(const CumulantGraph& g, const RingElement& value, bool gaussian);
  /// Entries with gaussian == true only.
  CumulantSpec gaussian_part() const;
  bool empty() const { return entries.empty(); }

  /// [{"graph": "v=..;e=..", "value": "1/10", "N_half_power": 0, "gaussian": false}, ...]
  static CumulantSpec from_json(const nlohmann::json& j, const std::string& path = "perturbations");
};

/// <M_ij M_kl>_c = sigma^2 delta_il delta_jk: the 2-cycle and the double
/// self-loop, both with value sigma^2.
CumulantSpec gaussian_cumulant_spec(const Rational& sigma_squared);

struct TruncationEntry {
  std::string graph;
  int t_order = 0;
  int edges = 0;
  friend bool operator==(const TruncationEntry&, const TruncationEntry&) = default;
};

struct FlowOptions {
  int max_edges = 6;
  /// Terms whose t-order j and edge count E satisfy j + E - 1 > horizon are
  /// discarded: they cannot reach the self-loop coefficient at order <= horizon.
  std::optional<int> horizon;
};

struct FlowState {
  struct Series {
    CumulantGraph graph;              // canonical representative
    std::vector<RingElement> coeffs;  // coeffs[k] multiplies t^k
  };

  int order = 0;
  Basis basis = Basis::free_sum_basis;
  FlowOptions options;
  std::map<std::string, Series> table;  // keyed by canonical label
  std::vector<RingElement> vacuum;      // edge-free part, per t-order
  std::vector<TruncationEntry> ledger;

  /// Coefficient of t^k for the class of `label` (zero when absent).
  RingElement coefficient(const std::string& label, int k) const;
  void add(const CumulantGraph& canonical, const std::string& label, int k, const RingElement& value);
  /// Removes series whose coefficients are all zero.
  void prune_zeros();

  /// Ledger entries exist at t-order <= order.
  bool truncated() const;
  /// True when the (k, edges) cell can be affected by a dropped term or by
  /// the horizon cut.
  bool cell_exact(int k, int edges) const;

  /// Term-exact equality of coefficient tables and vacuum series.
  bool same_values(const FlowState& other) const;

  nlohmann::json to_json() const;
  static FlowState from_json(const nlohmann::json& j);
};

/// t^0 state: d_G = C_G / (|Aut G| N^{e/2}) in the distinct basis,
/// converted to free sums by Moebius inversion over vertex partitions.
FlowState initial_potential(const CumulantSpec& spec, const FlowOptions& options = {});

/// Right-hand side of the flow, order by order: coeffs[k] of the result is
/// [loop(V) + tree(V, V)] at t^k, for k <= state.order.
FlowState rg_derivative(const FlowState& state);

/// d/dt of the right-hand side along the flow, linear in `w`:
/// loop(w) + tree(v, w) + tree(w, v), order by order.
FlowState linearized_derivative(const FlowState& v, const FlowState& w);

/// Picard integration of the flow to order k_max. Capacity error above 8.
FlowState integrate_flow(const FlowState& state0, int k_max);

/// Independent path: Gaussian integration of exp V0(X + Y) with propagator
/// t, connected Wick contractions only. Capacity error for k_max > 3.
FlowState wick_oracle(const CumulantSpec& spec, int k_max, const FlowOptions& options = {});

/// Free-sum coefficients to distinct-index coefficients d_G.
FlowState to_distinct_basis(const FlowState& state);

/// Coefficients of 1/z, ..., 1/z^k of the large-N resolvent. Needs a state
/// integrated to order >= k - 2. Invariant error when a positive power of N
/// survives in the n^0 self-loop series.
std::vector<Rational> extract_resolvent(const FlowState& state, int k);

enum class BoundKind { gaussian, eulerian_perturbation, non_eulerian_perturbation };
std::string to_string(BoundKind k);

struct BoundEntry {
  std::string graph;
  int t_order = 0;
  BoundKind kind = BoundKind::gaussian;
  int scaled_half_power = 0;  // 2 * (N-grade of N^{v-c-e/2} C_G, n^0 part)
  bool ok = true;
};

struct HigherNEntry {
  std::string graph;
  int t_order = 0;
  int n_power = 0;
  int scaled_half_power = 0;
};

struct BoundsReport {
  std::vector<BoundEntry> entries;
  /// Terms with n-degree >= 1 whose scaled N-grade would violate the bound.
  std::vector<HigherNEntry> higher_n_violations;
  bool all_ok() const;
};

/// Runs the flow for the Gaussian part alone and for the full spec to the
/// order of `state`, splits C' and C'' by subtraction, and checks the scaling
/// grades of every exact (graph, order) cell.
BoundsReport check_bounds_flow(const FlowState& state, const CumulantSpec& spec);

}  // namespace rmt::rg
