#include "rmt/spectral.hpp"

#include "rmt/error.hpp"
#include "rmt/hermitian.hpp"
#include "rmt/semicircle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rmt {

SpectrumSample scale_spectrum(std::span<const double> eigs, std::size_t n, SpectrumMeta meta) {
  require(eigs.size() == n, ErrorKind::shape,
          "scale_spectrum: got " + std::to_string(eigs.size()) + " eigenvalues for N = " + std::to_string(n));
  SpectrumSample s{n, {}, std::move(meta)};
  const double root = std::sqrt(static_cast<double>(n));
  s.eigs_scaled.reserve(n);
  for (double x : eigs) s.eigs_scaled.push_back(x / root);
  std::sort(s.eigs_scaled.begin(), s.eigs_scaled.end());
  return s;
}

double esd_moment(const SpectrumSample& s, int k) {
  require(k >= 0 && k <= 12, ErrorKind::parameter, "esd_moment: k must be in [0, 12]");
  require(!s.eigs_scaled.empty(), ErrorKind::shape, "esd_moment: empty spectrum");
  if (k == 0) return 1.0;
  double sum = 0.0;
  for (double x : s.eigs_scaled) {
    double p = x;
    for (int i = 1; i < k; ++i) p *= x;
    sum += p;
  }
  return sum / static_cast<double>(s.eigs_scaled.size());
}

std::vector<double> pooled(std::span<const SpectrumSample> samples) {
  std::vector<double> all;
  for (const auto& s : samples) all.insert(all.end(), s.eigs_scaled.begin(), s.eigs_scaled.end());
  return all;
}

std::vector<std::pair<double, double>> histogram(std::span<const double> values, int bins, double a, double b) {
  require(bins >= 1, ErrorKind::parameter, "histogram: bins must be >= 1");
  require(a < b, ErrorKind::parameter, "histogram: range must satisfy a < b");
  require(!values.empty(), ErrorKind::shape, "histogram: no values");
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  const double width = (b - a) / bins;
  for (double x : values) {
    if (!(x >= a && x <= b)) continue;
    auto k = static_cast<std::size_t>((x - a) / width);
    counts[std::min(k, counts.size() - 1)]++;
  }
  std::vector<std::pair<double, double>> out;
  const double total = static_cast<double>(values.size());
  for (int k = 0; k < bins; ++k)
    out.emplace_back(a + (k + 0.5) * width, static_cast<double>(counts[k]) / (total * width));
  return out;
}

std::vector<std::pair<double, double>> histogram(std::span<const SpectrumSample> samples, int bins, double a,
                                                 double b) {
  const auto all = pooled(samples);
  return histogram(all, bins, a, b);
}

double ks_distance_to_semicircle(std::span<const double> values, double sigma) {
  require(!values.empty(), ErrorKind::shape, "ks_distance: no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const semicircle::SemicircleParams p{sigma};
  double d = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double f = semicircle::cdf(v[i], p);
    d = std::max({d, std::abs(static_cast<double>(i) / n - f), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return d;
}

double ks_distance_to_semicircle(std::span<const SpectrumSample> samples, double sigma) {
  const auto all = pooled(samples);
  return ks_distance_to_semicircle(all, sigma);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SpectrumSample> sample_spectra(const EnsembleSpec& spec, std::size_t n, std::size_t samples,
                                           RngHandle root, std::vector<std::string>* warnings, unsigned threads) {
  require(samples >= 1, ErrorKind::parameter, "samples_per_N must be >= 1");
  const RngHandle per_n = derive(root, n);
  const std::string hash = spec_hash(spec);
  std::vector<SpectrumSample> out(samples);
  if (spec.kind == EnsembleKind::quartic_invariant) {
    auto states = sample_chain(spec, n, per_n, samples);
    parallel_for(
        samples,
        [&](std::size_t s) {
          out[s] = scale_spectrum(eigenvalues_hermitian(states[s].matrix), n, {hash, root.seed, s});
        },
        threads);
    if (warnings)
      for (const auto& w : states.front().diagnostics.warnings)
        warnings->push_back("N=" + std::to_string(n) + ": " + w);
    return out;
  }
  parallel_for(
      samples,
      [&](std::size_t s) {
        const auto h = sample(spec, n, derive(per_n, s));
        out[s] = scale_spectrum(eigenvalues_hermitian(h), n, {hash, root.seed, s});
      },
      threads);
  return out;
}

std::vector<MomentRow> moment_rows(std::span<const SpectrumSample> samples, std::span<const int> k_list,
                                   double sigma) {
  require(!samples.empty(), ErrorKind::shape, "moment_rows: no samples");
  std::vector<MomentRow> rows;
  const double count = static_cast<double>(samples.size());
  for (int k : k_list) {
    double sum = 0.0;
    for (const auto& s : samples) sum += esd_moment(s, k);
    const double mean = sum / count;
    double se = 0.0;
    if (samples.size() > 1) {
      double ss = 0.0;
      for (const auto& s : samples) ss += std::pow(esd_moment(s, k) - mean, 2);
      se = std::sqrt(ss / (count - 1.0) / count);
    }
    const double ref = semicircle::moment(k, {sigma});
    rows.push_back({samples.front().n, k, mean, se, std::abs(mean - ref)});
  }
  return rows;
}

std::vector<MomentRow> convergence_scan(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                                        std::span<const int> k_list, std::size_t samples_per_n, RngHandle root,
                                        unsigned threads) {
  require(!n_grid.empty(), ErrorKind::parameter, "convergence_scan: empty N grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    require(n_grid[i] > n_grid[i - 1], ErrorKind::parameter, "convergence_scan: N grid must be ascending");
  std::vector<MomentRow> rows;
  for (std::size_t n : n_grid) {
    const auto samples = sample_spectra(spec, n, samples_per_n, root, nullptr, threads);
    const auto r = moment_rows(samples, k_list, spec.sigma);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

}  // namespace rmt
