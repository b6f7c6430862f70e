#pragma once

#include <span>
#include <string>

namespace rmt {

inline constexpr int kSvgWidth = 640;
inline constexpr int kSvgHeight = 400;

struct SpectrumPlotOptions {
  double sigma = 1.0;
  int bins = 60;
  std::string title;
};

/// Standalone SVG: density histogram of `values` on [-2.5 sigma, 2.5 sigma]
/// with the semicircle density drawn over it. Output bytes depend only on
/// the inputs.
std::string spectrum_svg(std::span<const double> values, const SpectrumPlotOptions& options);

}  // namespace rmt
