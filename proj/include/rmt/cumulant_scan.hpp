#pragma once

// Monte Carlo estimates of joint entry cumulants C_G at distinct indices,
// and the finite-N bound scan built on them.

#include "rmt/ensembles.hpp"
#include "rmt/graph.hpp"
#include "rmt/rng.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace rmt {

inline constexpr int kMaxScanEdges = 4;

struct CumulantEstimate {
  std::complex<double> value;
  double stderr_ = 0.0;  // jackknife over matrices, real part
};

/// Plug-in joint cumulant of the entries (M_{i_s(e) i_t(e)})_e over distinct
/// indices. Each matrix contributes floor(N / v) disjoint index tuples;
/// moments are pooled and cumulants taken by Moebius inversion over edge
/// partitions. Matrices use the same streams as the spectrum sampler.
CumulantEstimate estimate_entry_cumulant(const EnsembleSpec& spec, const CumulantGraph& g, std::size_t n,
                                         std::size_t samples, RngHandle root, unsigned threads = 0);

/// Estimates for several graphs from one set of matrices.
std::vector<CumulantEstimate> estimate_entry_cumulants(const EnsembleSpec& spec, std::span<const CumulantGraph> graphs,
                                                       std::size_t n, std::size_t samples, RngHandle root,
                                                       unsigned threads = 0);

struct ScanRow {
  std::size_t n = 0;
  std::string graph;
  double scaled_estimate = 0.0;  // N^{v-c-e/2} Re C_G
  double stderr_ = 0.0;          // scaled the same way
  BoundVerdict verdict = BoundVerdict::consistent_vanishing;
};

/// One row per (N, graph), ordered by graph then N; the verdict of a graph
/// comes from its whole N series.
std::vector<ScanRow> cumulant_scan(const EnsembleSpec& spec, std::span<const CumulantGraph> graphs,
                                   std::span<const std::size_t> n_grid, std::size_t samples, RngHandle root,
                                   const BoundThresholds& thresholds = {}, unsigned threads = 0);

}  // namespace rmt
