#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "immunet/error.hpp"
#include "immunet/report_io.hpp"

namespace immunet {

struct PlotAxes {
  double x_min = 2.0, x_max = 3.0;
  double y_min = 0.0, y_max = 1.0;
};

/// One panel of the comparison figure: simulated mean and error bar per
/// (tau, alpha), analytic line per alpha.
struct PanelSpec {
  std::string file_name;
  std::string title;
  double SummaryRow::*sim;
  double SummaryRow::*se;
  double SummaryRow::*ana;
};

inline std::vector<PanelSpec> figure_panels() {
  return {
      {"gin_gcc.svg", "(a) GIN / GCC", &SummaryRow::gin_gcc_sim, &SummaryRow::gin_gcc_se, &SummaryRow::gin_gcc_ana},
      {"gout_gcc.svg", "(b) GOUT / GCC", &SummaryRow::gout_gcc_sim, &SummaryRow::gout_gcc_se,
       &SummaryRow::gout_gcc_ana},
      {"spread.svg", "(c) expected spread", &SummaryRow::spread_sim, &SummaryRow::spread_se, &SummaryRow::spread_ana},
      {"vulnerability.svg", "(d) expected vulnerability", &SummaryRow::vuln_sim, &SummaryRow::vuln_se,
       &SummaryRow::vuln_ana},
  };
}

namespace detail {

inline std::string f2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string fg(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace detail

/// Renders one panel as a standalone SVG document. Output depends only on
/// the rows, the panel and the axes.
inline std::string render_panel_svg(const std::vector<SummaryRow>& rows, const PanelSpec& panel,
                                    const PlotAxes& axes = {}) {
  using detail::f2;
  using detail::fg;
  if (rows.empty()) throw NoData("plot: no rows");
  if (!(axes.x_max > axes.x_min) || !(axes.y_max > axes.y_min)) throw InvalidParameter("plot: empty axis range");
  constexpr double W = 640, H = 480, L = 70, R = 130, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double x) { return L + (x - axes.x_min) / (axes.x_max - axes.x_min) * pw; };
  auto sy = [&](double y) { return T + ph - (y - axes.y_min) / (axes.y_max - axes.y_min) * ph; };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

  std::map<double, std::vector<const SummaryRow*>> by_alpha;
  for (const auto& r : rows) by_alpha[r.alpha].push_back(&r);
  for (auto& [a, v] : by_alpha)
    std::sort(v.begin(), v.end(), [](const SummaryRow* x, const SummaryRow* y) { return x->tau < y->tau; });

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fg(W) + "\" height=\"" + fg(H) + "\" viewBox=\"0 0 " +
       fg(W) + " " + fg(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + f2(L + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + panel.title +
       "</text>\n";
  s += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  s += "<rect x=\"" + f2(L) + "\" y=\"" + f2(T) + "\" width=\"" + f2(pw) + "\" height=\"" + f2(ph) + "\"/>\n";
  for (int i = 0; i <= 10; ++i) {
    const double x = axes.x_min + (axes.x_max - axes.x_min) * i / 10.0;
    const double y = axes.y_min + (axes.y_max - axes.y_min) * i / 10.0;
    s += "<line x1=\"" + f2(sx(x)) + "\" y1=\"" + f2(T + ph) + "\" x2=\"" + f2(sx(x)) + "\" y2=\"" + f2(T + ph + 5) +
         "\"/>\n";
    s += "<line x1=\"" + f2(L - 5) + "\" y1=\"" + f2(sy(y)) + "\" x2=\"" + f2(L) + "\" y2=\"" + f2(sy(y)) + "\"/>\n";
  }
  s += "</g>\n<g class=\"tick-labels\" fill=\"black\">\n";
  for (int i = 0; i <= 10; i += 2) {
    const double x = axes.x_min + (axes.x_max - axes.x_min) * i / 10.0;
    const double y = axes.y_min + (axes.y_max - axes.y_min) * i / 10.0;
    s += "<text x=\"" + f2(sx(x)) + "\" y=\"" + f2(T + ph + 20) + "\" text-anchor=\"middle\">" + fg(x) + "</text>\n";
    s += "<text x=\"" + f2(L - 8) + "\" y=\"" + f2(sy(y) + 4) + "\" text-anchor=\"end\">" + fg(y) + "</text>\n";
  }
  s += "<text x=\"" + f2(L + pw / 2) + "\" y=\"" + f2(H - 15) + "\" text-anchor=\"middle\">tau</text>\n";
  s += "</g>\n";

  std::size_t k = 0;
  for (const auto& [alpha, series] : by_alpha) {
    const std::string color = palette[k % (sizeof palette / sizeof *palette)];
    const std::string a = fg(alpha);
    s += "<g class=\"sim-series\" data-alpha=\"" + a + "\" stroke=\"" + color + "\" fill=\"" + color + "\">\n";
    for (const SummaryRow* r : series) {
      const double y = r->*panel.sim, e = r->*panel.se;
      if (!std::isfinite(y)) continue;
      const double px = sx(r->tau);
      if (std::isfinite(e) && e > 0)
        s += "<line x1=\"" + f2(px) + "\" y1=\"" + f2(sy(y - e)) + "\" x2=\"" + f2(px) + "\" y2=\"" + f2(sy(y + e)) +
             "\"/>\n";
      s += "<circle cx=\"" + f2(px) + "\" cy=\"" + f2(sy(y)) + "\" r=\"3\"/>\n";
    }
    s += "</g>\n";
    std::string pts;
    for (const SummaryRow* r : series) {
      const double y = r->*panel.ana;
      if (!std::isfinite(y)) continue;
      if (!pts.empty()) pts += ' ';
      pts += f2(sx(r->tau)) + "," + f2(sy(y));
    }
    s += "<g class=\"ana-series\" data-alpha=\"" + a + "\"><polyline fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.5\" points=\"" + pts + "\"/></g>\n";
    const double ly = T + 15 + 18 * static_cast<double>(k);
    s += "<g class=\"legend\"><line x1=\"" + f2(L + pw + 12) + "\" y1=\"" + f2(ly) + "\" x2=\"" + f2(L + pw + 32) +
         "\" y2=\"" + f2(ly) + "\" stroke=\"" + color + "\"/><circle cx=\"" + f2(L + pw + 22) + "\" cy=\"" + f2(ly) +
         "\" r=\"3\" fill=\"" + color + "\"/><text x=\"" + f2(L + pw + 38) + "\" y=\"" + f2(ly + 4) +
         "\">alpha=" + a + "</text></g>\n";
    ++k;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace immunet
