#include "rmt/svg_plot.hpp"

#include "rmt/error.hpp"
#include "rmt/semicircle.hpp"
#include "rmt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rmt {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string spectrum_svg(std::span<const double> values, const SpectrumPlotOptions& options) {
  require(!values.empty(), ErrorKind::parameter, "plot: no eigenvalues to draw");
  require(options.sigma > 0 && std::isfinite(options.sigma), ErrorKind::parameter, "plot: sigma must be > 0");
  require(options.bins >= 1, ErrorKind::parameter, "plot: bins must be >= 1");

  const double lo = -2.5 * options.sigma, hi = 2.5 * options.sigma;
  const auto hist = histogram(values, options.bins, lo, hi);
  const semicircle::SemicircleParams params{options.sigma};

  // Plot area.
  const double left = 60, right = kSvgWidth - 20, top = 40, bottom = kSvgHeight - 50;
  double ymax = semicircle::density(0.0, params);
  for (const auto& [x, d] : hist) ymax = std::max(ymax, d);
  ymax *= 1.1;
  auto px = [&](double x) { return left + (x - lo) / (hi - lo) * (right - left); };
  auto py = [&](double y) { return bottom - y / ymax * (bottom - top); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kSvgWidth) + "\" height=\"" +
       std::to_string(kSvgHeight) + "\" viewBox=\"0 0 " + std::to_string(kSvgWidth) + " " +
       std::to_string(kSvgHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    s += "<text x=\"" + fmt(kSvgWidth / 2.0) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + escape(options.title) + "</text>\n";

  const double width = (hi - lo) / options.bins;
  s += "<g fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\">\n";
  for (const auto& [center, d] : hist) {
    if (d <= 0) continue;
    const double x0 = px(center - width / 2), x1 = px(center + width / 2);
    s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(py(d)) + "\" width=\"" + fmt(x1 - x0) + "\" height=\"" +
         fmt(bottom - py(d)) + "\"/>\n";
  }
  s += "</g>\n";

  s += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
  const int steps = 400;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    if (i > 0) s += ' ';
    s += fmt(px(x)) + "," + fmt(py(semicircle::density(x, params)));
  }
  s += "\"/>\n";

  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(right) + "\" y2=\"" + fmt(bottom) + "\"/>\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(bottom) + "\"/>\n";
  s += "</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n";
  for (int k = -2; k <= 2; ++k) {
    const double x = px(k * options.sigma);
    s += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(bottom + 5) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(bottom + 18) + "\">" + std::to_string(k) +
         (k == 0 ? "" : "&#963;") + "</text>\n";
  }
  s += "<text x=\"" + fmt((left + right) / 2) + "\" y=\"" + fmt(kSvgHeight - 12.0) + "\">eigenvalue of M/&#8730;N</text>\n";
  s += "<text x=\"16\" y=\"" + fmt((top + bottom) / 2) + "\" transform=\"rotate(-90 16 " + fmt((top + bottom) / 2) +
       ")\">density</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace rmt
