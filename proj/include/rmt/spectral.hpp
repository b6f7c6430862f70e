#pragma once

// Empirical spectral distribution statistics for samples of M / sqrt(N).

#include "rmt/ensembles.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rmt {

struct SpectrumMeta {
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::size_t sample_index = 0;
};

struct SpectrumSample {
  std::size_t n = 0;
  std::vector<double> eigs_scaled;  // ascending
  SpectrumMeta meta;
};

/// Divides by sqrt(n) and sorts. Shape error when eigs.size() != n.
SpectrumSample scale_spectrum(std::span<const double> eigs, std::size_t n, SpectrumMeta meta = {});

/// (1/N) sum lambda^k. Parameter error for k > 12.
double esd_moment(const SpectrumSample& s, int k);

/// (bin_center, density); density integrates to the fraction of values in
/// [a, b]. The right edge b is included in the last bin.
std::vector<std::pair<double, double>> histogram(std::span<const double> values, int bins, double a, double b);
std::vector<std::pair<double, double>> histogram(std::span<const SpectrumSample> samples, int bins, double a, double b);

/// sup |F_emp - F_sc| over all jump points. Values need not be sorted.
double ks_distance_to_semicircle(std::span<const double> values, double sigma);
double ks_distance_to_semicircle(std::span<const SpectrumSample> samples, double sigma);

std::vector<double> pooled(std::span<const SpectrumSample> samples);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Callers write results into slot i, so output order never
/// depends on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

/// `samples` spectra of size n. Independent kinds use stream
/// derive(derive(root, n), s) for sample s; the quartic kind runs one chain
/// on derive(root, n). Diagnostics warnings are appended to `warnings`.
std::vector<SpectrumSample> sample_spectra(const EnsembleSpec& spec, std::size_t n, std::size_t samples,
                                           RngHandle root, std::vector<std::string>* warnings = nullptr,
                                           unsigned threads = 0);

struct MomentRow {
  std::size_t n = 0;
  int k = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // 0 when only one sample
  double gap = 0.0;      // |mean - semicircle moment|
};

std::vector<MomentRow> moment_rows(std::span<const SpectrumSample> samples, std::span<const int> k_list,
                                   double sigma);

/// For each N in the ascending grid, samples spectra and tabulates moments.
std::vector<MomentRow> convergence_scan(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                                        std::span<const int> k_list, std::size_t samples_per_n, RngHandle root,
                                        unsigned threads = 0);

}  // namespace rmt
