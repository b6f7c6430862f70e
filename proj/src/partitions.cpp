#include "rmt/partitions.hpp"

#include "rmt/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rmt {

std::vector<SetPartition> set_partitions(int k) {
  require(k >= 0, ErrorKind::parameter, "set_partitions: negative size");
  require(k <= kMaxPartitionSize, ErrorKind::capacity,
          "set_partitions supports ground sets of at most " + std::to_string(kMaxPartitionSize));
  std::vector<SetPartition> out;
  if (k == 0) {
    out.push_back({0, {}});
    return out;
  }
  // Restricted-growth strings a[0]=0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(static_cast<std::size_t>(k), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(k), 0);
  while (true) {
    SetPartition p;
    p.ground_size = k;
    const int blocks = prefix_max[k - 1] + 1;
    p.blocks.resize(static_cast<std::size_t>(blocks));
    for (int i = 0; i < k; ++i) p.blocks[a[i]].push_back(i);
    out.push_back(std::move(p));

    int i = k - 1;
    while (i > 0 && a[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (int j = i + 1; j < k; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return out;
}

BigInt moebius_weight(int blocks) {
  BigInt w = 1;
  for (int i = 2; i < blocks; ++i) w *= i;
  return (blocks % 2 == 1) ? w : BigInt(-w);
}

CumulantFunction gaussian_cumulants(const Rational& sigma_squared) {
  return {[sigma_squared](const CumulantGraph& g, std::span<const long>, long) -> Rational {
            if (g.num_edges() != 2) return 0;
            const auto& e = g.edges();
            // M_ij M_kl with l == i and k == j: either a 2-cycle or a double self-loop.
            if (e[0].source == e[1].target && e[0].target == e[1].source) return sigma_squared;
            return 0;
          },
          "gaussian(sigma^2=" + to_string(sigma_squared) + ")"};
}

Rational moments_from_cumulants(const CumulantFunction& c, std::span<const IndexPair> pairs, long n) {
  require(pairs.size() <= kMaxMomentPairs, ErrorKind::capacity,
          "moments_from_cumulants supports at most " + std::to_string(kMaxMomentPairs) + " factors");
  if (pairs.empty()) return 1;
  Rational total = 0;
  std::vector<IndexPair> block_pairs;
  for (const SetPartition& p : set_partitions(static_cast<int>(pairs.size()))) {
    Rational product = 1;
    for (const auto& block : p.blocks) {
      block_pairs.clear();
      for (int idx : block) block_pairs.push_back(pairs[idx]);
      auto [graph, indices] = graph_with_indices(block_pairs);
      product *= c.evaluate(graph, indices, n);
      if (product == 0) break;
    }
    total += product;
  }
  return total;
}

Rational cumulants_from_moments(const MomentFunction& m, std::span<const IndexPair> pairs) {
  require(pairs.size() <= kMaxCumulantPairs, ErrorKind::capacity,
          "cumulants_from_moments supports at most " + std::to_string(kMaxCumulantPairs) + " factors");
  if (pairs.empty()) return 0;
  Rational total = 0;
  std::vector<IndexPair> block_pairs;
  for (const SetPartition& p : set_partitions(static_cast<int>(pairs.size()))) {
    Rational product = 1;
    for (const auto& block : p.blocks) {
      block_pairs.clear();
      for (int idx : block) block_pairs.push_back(pairs[idx]);
      product *= m(block_pairs);
      if (product == 0) break;
    }
    total += Rational(moebius_weight(p.num_blocks())) * product;
  }
  return total;
}

Rational trace_moment_expectation(long n, int k, const CumulantFunction& c) {
  require(n >= 1 && k >= 0, ErrorKind::parameter, "trace_moment_expectation: need N >= 1, k >= 0");
  require(static_cast<std::size_t>(k) <= kMaxMomentPairs, ErrorKind::capacity,
          "trace_moment_expectation: k exceeds the moment expansion bound");
  require(std::pow(static_cast<double>(n), k) <= 1e7, ErrorKind::capacity,
          "trace_moment_expectation: N^k exceeds 1e7");
  if (k == 0) return Rational(n) / Rational(n);  // Tr(1)/N

  Rational sum = 0;
  std::vector<long> idx(static_cast<std::size_t>(k), 0);
  std::vector<IndexPair> pairs(static_cast<std::size_t>(k));
  while (true) {
    for (int s = 0; s < k; ++s) pairs[s] = {idx[s], idx[(s + 1) % k]};
    sum += moments_from_cumulants(c, pairs, n);
    int pos = k - 1;
    while (pos >= 0 && ++idx[pos] == n) idx[pos--] = 0;
    if (pos < 0) break;
  }
  // divide by N^{k/2 + 1}; k odd leaves a sqrt(N) that only multiplies zero
  // for the centred ensembles considered here.
  Rational denom = rational_pow(Rational(n), k / 2 + 1);
  if (k % 2 == 1) {
    const auto root = static_cast<long>(std::llround(std::sqrt(static_cast<double>(n))));
    require(sum == 0 || root * root == n, ErrorKind::numerical,
            "trace_moment_expectation: odd k with non-zero sum needs a square N for an exact result");
    denom *= Rational(root);
  }
  return sum / denom;
}

BigInt catalan(int l) {
  require(l >= 0, ErrorKind::parameter, "catalan: negative index");
  require(l <= 30, ErrorKind::capacity, "catalan supports l <= 30");
  BigInt num = 1;
  for (int i = 2; i <= 2 * l; ++i) num *= i;
  BigInt fact = 1;
  for (int i = 2; i <= l; ++i) fact *= i;
  return num / (fact * fact * (l + 1));
}

Extrapolation extrapolate_limit(std::span<const std::pair<double, double>> values) {
  require(values.size() >= 3, ErrorKind::parameter, "extrapolate_limit needs at least 3 points");
  for (std::size_t i = 1; i < values.size(); ++i)
    require(values[i].first > values[i - 1].first, ErrorKind::parameter, "extrapolate_limit: N must be ascending");

  // Normal equations for basis (1, u, u^2) with u = N_min / N, which keeps
  // the system well scaled; the constant term is unchanged.
  const double n_min = values.front().first;
  double ata[3][3] = {};
  double atb[3] = {};
  for (const auto& [n, v] : values) {
    const double u = n_min / n;
    const double row[3] = {1.0, u, u * u};
    for (int r = 0; r < 3; ++r) {
      atb[r] += row[r] * v;
      for (int c = 0; c < 3; ++c) ata[r][c] += row[r] * row[c];
    }
  }
  // Gaussian elimination with partial pivoting.
  double m[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r][c] = ata[r][c];
    m[r][3] = atb[r];
  }
  double scale = 0.0;
  for (auto& row : ata)
    for (double x : row) scale = std::max(scale, std::abs(x));
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) <= 1e-14 * scale) return {values.back().second, true};
    for (int c = 0; c < 4; ++c) std::swap(m[col][c], m[pivot][c]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  const double a = m[0][3] / m[0][0];
  if (!std::isfinite(a)) return {values.back().second, true};
  return {a, false};
}

}  // namespace rmt
