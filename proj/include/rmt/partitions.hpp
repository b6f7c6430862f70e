#pragma once

// Set-partition calculus linking joint moments and joint cumulants of matrix
// entries, with exact arithmetic throughout.

#include "rmt/exact.hpp"
#include "rmt/graph.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rmt {

inline constexpr int kMaxPartitionSize = 10;

struct SetPartition {
  int ground_size = 0;
  std::vector<std::vector<int>> blocks;  // ordered by smallest element

  int num_blocks() const { return static_cast<int>(blocks.size()); }
};

/// All Bell(k) partitions of {0..k-1}, enumerated as restricted-growth
/// strings in lexicographic order. Capacity error for k > 10.
std::vector<SetPartition> set_partitions(int k);

/// Partition-lattice Moebius weight (-1)^{p-1} (p-1)! for a p-block partition.
BigInt moebius_weight(int blocks);

/// Joint cumulant of the entries of a sub-monomial, given as its graph and
/// the matrix index carried by each graph vertex, at matrix size N.
struct CumulantFunction {
  std::function<Rational(const CumulantGraph&, std::span<const long>, long)> evaluate;
  std::string description;
};

/// <M_ij M_kl>_c = sigma^2 delta_il delta_jk; every other cumulant vanishes.
CumulantFunction gaussian_cumulants(const Rational& sigma_squared);

inline constexpr std::size_t kMaxMomentPairs = 8;
inline constexpr std::size_t kMaxCumulantPairs = 6;

/// Joint moment as the sum over set partitions of products of block
/// cumulants. Capacity error beyond 8 factors.
Rational moments_from_cumulants(const CumulantFunction& c, std::span<const IndexPair> pairs, long n);

/// Moment of the sub-monomial given by the listed pairs.
using MomentFunction = std::function<Rational(std::span<const IndexPair>)>;

/// Moebius inversion on the partition lattice. Capacity error beyond 6.
Rational cumulants_from_moments(const MomentFunction& m, std::span<const IndexPair> pairs);

/// Joint cumulant from a moment oracle over subsets of {0..k-1}; works for
/// any ring-like value type constructible from long (exact or floating,
/// real or complex).
template <class T, class SubsetMoment>
T cumulant_from_subset_moments(int k, SubsetMoment&& moment_of_subset) {
  T total{};
  for (const SetPartition& p : set_partitions(k)) {
    T product = T(1);
    for (const auto& block : p.blocks) product *= moment_of_subset(std::span<const int>(block));
    total += T(moebius_weight(p.num_blocks()).template convert_to<long>()) * product;
  }
  return total;
}

/// Exact (1/N^{k/2+1}) sum over index tuples of <M_{i1 i2} ... M_{ik i1}>,
/// with moments expanded through `c`. Capacity error when N^k > 1e7.
Rational trace_moment_expectation(long n, int k, const CumulantFunction& c);

/// (2l)! / ((l!)^2 (l+1)). Capacity error for l > 30.
BigInt catalan(int l);

struct Extrapolation {
  double limit = 0.0;
  bool fallback = false;  // system was degenerate; limit is the last value
};

/// Least-squares fit of value(N) = a + b/N + c/N^2; returns a. Needs >= 3
/// points with ascending N.
Extrapolation extrapolate_limit(std::span<const std::pair<double, double>> values);

}  // namespace rmt
