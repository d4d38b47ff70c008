#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace vislim::io {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Static SVG line plot on log-log axes; nonpositive points are dropped.
inline std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<PlotSeries>& series) {
  const double W = 640, H = 440, L = 70, R = 170, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k)
      if (s.x[k] > 0 && s.y[k] > 0) {
        x0 = std::min(x0, std::log10(s.x[k]));
        x1 = std::max(x1, std::log10(s.x[k]));
        y0 = std::min(y0, std::log10(s.y[k]));
        y1 = std::max(y1, std::log10(s.y[k]));
      }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (std::log10(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (std::log10(v) - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

  char buf[256];
  std::string s;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
                "font-size=\"12\">\n<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
                W, H);
  s += buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"24\" font-size=\"14\">%s</text>\n", L, title.c_str());
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                W - L - R, H - T - B);
  s += buf;
  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
    const double X = px(std::pow(10.0, e));
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.0f\" text-anchor=\"middle\">1e%d</text>\n", X, H - B + 16, e);
    s += buf;
  }
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    const double Y = py(std::pow(10.0, e));
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.1f\" text-anchor=\"end\">1e%d</text>\n", L - 6, Y + 4, e);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"middle\">%s</text>\n", (L + W - R) / 2,
                H - 12, xlabel.c_str());
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%.0f\" text-anchor=\"middle\" transform=\"rotate(-90 16 %.0f)\">%s</text>\n",
                (T + H - B) / 2, (T + H - B) / 2, ylabel.c_str());
  s += buf;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& se = series[k];
    const char* c = colors[k % 8];
    std::string pts;
    for (std::size_t q = 0; q < se.x.size(); ++q)
      if (se.x[q] > 0 && se.y[q] > 0) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(se.x[q]), py(se.y[q]));
        pts += buf;
      }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%.0f\" y=\"%.0f\">%s</text>\n",
                  W - R + 10, T + 14 + 18.0 * k, W - R + 30, T + 14 + 18.0 * k, c, W - R + 36, T + 18 + 18.0 * k,
                  se.label.c_str());
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace vislim::io
