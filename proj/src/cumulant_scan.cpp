#include "rmt/cumulant_scan.hpp"

#include "rmt/error.hpp"
#include "rmt/partitions.hpp"
#include "rmt/spectral.hpp"

#include <cmath>

namespace rmt {

namespace {

using C = std::complex<double>;


// Adds the product over every non-empty edge subset, for each index tuple.
void accumulate(const HermitianMatrix& m, std::span<const CumulantGraph> graphs, std::vector<C>& out) {
  const std::size_t n = m.size();
  std::size_t offset = 0;
  for (const auto& g : graphs) {
    const int e = g.num_edges();
    const std::size_t masks = std::size_t{1} << e;
    const std::size_t v = static_cast<std::size_t>(g.num_vertices());
    std::vector<C> x(static_cast<std::size_t>(e));
    for (std::size_t t = 0; (t + 1) * v <= n; ++t) {
      const std::size_t base = t * v;
      for (int k = 0; k < e; ++k) x[k] = m(base + g.edges()[k].source, base + g.edges()[k].target);
      for (std::size_t mask = 1; mask < masks; ++mask) {
        C p = 1.0;
        for (int k = 0; k < e; ++k)
          if (mask >> k & 1) p *= x[k];
        out[offset + mask] += p;
      }
    }
    offset += masks;
  }
}

C cumulant_of(const std::vector<C>& moments, std::size_t offset, int e) {
  return cumulant_from_subset_moments<C>(e, [&](std::span<const int> block) {
    std::size_t mask = 0;
    for (int k : block) mask |= std::size_t{1} << k;
    return moments[offset + mask];
  });
}

}  // namespace

std::vector<CumulantEstimate> estimate_entry_cumulants(const EnsembleSpec& spec, std::span<const CumulantGraph> graphs,
                                                       std::size_t n, std::size_t samples, RngHandle root,
                                                       unsigned threads) {
  spec.validate();
  require(samples >= 2, ErrorKind::parameter, "cumulant scan needs at least 2 samples per N");
  std::size_t width = 0;
  for (const auto& g : graphs) {
    require(g.num_edges() >= 1 && g.num_edges() <= kMaxScanEdges, ErrorKind::parameter,
            "cumulant scan supports graphs with 1.." + std::to_string(kMaxScanEdges) + " edges: " + g.to_text());
    require(static_cast<std::size_t>(g.num_vertices()) <= n, ErrorKind::parameter,
            "graph " + g.to_text() + " has more vertices than N = " + std::to_string(n));
    width += std::size_t{1} << g.num_edges();
  }
  std::vector<std::vector<C>> per_matrix(samples, std::vector<C>(width));
  const RngHandle per_n = derive(root, n);
  if (spec.kind == EnsembleKind::quartic_invariant) {
    const auto chain = sample_chain(spec, n, per_n, samples);
    parallel_for(samples, [&](std::size_t s) { accumulate(chain[s].matrix, graphs, per_matrix[s]); }, threads);
  } else {
    parallel_for(
        samples, [&](std::size_t s) { accumulate(sample(spec, n, derive(per_n, s)), graphs, per_matrix[s]); },
        threads);
  }

  std::vector<C> total(width);
  for (const auto& row : per_matrix)
    for (std::size_t i = 0; i < width; ++i) total[i] += row[i];

  std::vector<CumulantEstimate> out;
  std::size_t offset = 0;
  for (const auto& g : graphs) {
    const int e = g.num_edges();
    const double tuples = static_cast<double>(n / static_cast<std::size_t>(g.num_vertices()));
    const std::size_t masks = std::size_t{1} << e;
    std::vector<C> moments(width);
    for (std::size_t mask = 1; mask < masks; ++mask)
      moments[offset + mask] = total[offset + mask] / (tuples * static_cast<double>(samples));
    const C full = cumulant_of(moments, offset, e);

    std::vector<double> loo(samples);
    double mean = 0.0;
    const double denom = tuples * static_cast<double>(samples - 1);
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t mask = 1; mask < masks; ++mask)
        moments[offset + mask] = (total[offset + mask] - per_matrix[s][offset + mask]) / denom;
      loo[s] = cumulant_of(moments, offset, e).real();
      mean += loo[s];
    }
    mean /= static_cast<double>(samples);
    double ss = 0.0;
    for (double x : loo) ss += (x - mean) * (x - mean);
    const double jack = std::sqrt(ss * static_cast<double>(samples - 1) / static_cast<double>(samples));
    out.push_back({full, jack});
    offset += masks;
  }
  return out;
}

CumulantEstimate estimate_entry_cumulant(const EnsembleSpec& spec, const CumulantGraph& g, std::size_t n,
                                         std::size_t samples, RngHandle root, unsigned threads) {
  return estimate_entry_cumulants(spec, std::span<const CumulantGraph>(&g, 1), n, samples, root, threads).front();
}

std::vector<ScanRow> cumulant_scan(const EnsembleSpec& spec, std::span<const CumulantGraph> graphs,
                                   std::span<const std::size_t> n_grid, std::size_t samples, RngHandle root,
                                   const BoundThresholds& thresholds, unsigned threads) {
  require(!graphs.empty(), ErrorKind::parameter, "graphs_to_scan: empty");
  require(n_grid.size() >= 3, ErrorKind::parameter, "N_grid: the bound scan needs at least 3 values of N");
  std::vector<std::vector<ScanPoint>> points(graphs.size());
  for (std::size_t n : n_grid) {
    const auto est = estimate_entry_cumulants(spec, graphs, n, samples, root, threads);
    for (std::size_t i = 0; i < graphs.size(); ++i)
      points[i].push_back({static_cast<double>(n), est[i].value.real(), est[i].stderr_});
  }
  std::vector<ScanRow> rows;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const BoundVerdict verdict = classify_bound(graphs[i], points[i], thresholds);
    const double exponent = to_double(scaling_exponent(graphs[i]));
    for (const auto& p : points[i]) {
      const double f = std::pow(p.n, exponent);
      rows.push_back({static_cast<std::size_t>(p.n), graphs[i].to_text(), p.value * f, p.stderr_ * f, verdict});
    }
  }
  return rows;
}

}  // namespace rmt
