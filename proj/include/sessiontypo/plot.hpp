#pragma once

// Standalone SVG of the first principal plane: one <circle> per session,
// one <ellipse> per cluster that has one. Fixed 800x600 canvas, fixed
// palette, fixed number formatting, so the bytes depend only on the report.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <string_view>

#include "sessiontypo/report.hpp"

namespace sessiontypo {

struct PlotStyle {
  static constexpr double width = 800, height = 600;
  static constexpr double left = 70, right = 190, top = 50, bottom = 60;
  static constexpr double point_radius = 3.5;
  static constexpr std::array<std::string_view, 10> palette = {
      "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
      "#e6ab02", "#a6761d", "#666666", "#1f78b4", "#b2df8a"};
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string comment_safe(std::string s) {
  std::size_t pos;
  while ((pos = s.find("--")) != std::string::npos) s.replace(pos, 2, "- ");
  return s;
}

inline std::string_view cluster_color(int label) {
  return PlotStyle::palette[static_cast<std::size_t>(label - 1) % PlotStyle::palette.size()];
}

}  // namespace detail

inline std::string render_svg(const PlaneView& view) {
  using detail::num;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  auto include = [&](double x, double y) {
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
    }
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const auto& p : view.points) include(p[0], p[1]);
  for (const auto& ce : view.ellipses) {
    if (!ce.ellipse) continue;
    const auto& e = *ce.ellipse;
    const double c = std::cos(e.angle), s = std::sin(e.angle);
    const double hx = std::hypot(e.semi_axes[0] * c, e.semi_axes[1] * s);
    const double hy = std::hypot(e.semi_axes[0] * s, e.semi_axes[1] * c);
    include(e.center[0] - hx, e.center[1] - hy);
    include(e.center[0] + hx, e.center[1] + hy);
  }
  if (first) include(0, 0);
  const double pad_x = std::max(0.05 * (xmax - xmin), 1e-6), pad_y = std::max(0.05 * (ymax - ymin), 1e-6);
  xmin -= pad_x;
  xmax += pad_x;
  ymin -= pad_y;
  ymax += pad_y;

  // same scale on both axes
  const double plot_w = PlotStyle::width - PlotStyle::left - PlotStyle::right;
  const double plot_h = PlotStyle::height - PlotStyle::top - PlotStyle::bottom;
  const double scale = std::min(plot_w / (xmax - xmin), plot_h / (ymax - ymin));
  const double ox = PlotStyle::left + 0.5 * (plot_w - scale * (xmax - xmin));
  const double oy = PlotStyle::top + 0.5 * (plot_h - scale * (ymax - ymin));
  auto sx = [&](double x) { return ox + scale * (x - xmin); };
  auto sy = [&](double y) { return oy + scale * (ymax - y); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\" "
         "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + num(PlotStyle::left) + "\" y=\"28\" font-size=\"15\">Principal plane, " +
         std::to_string(view.k) + " clusters</text>\n";

  // frame and zero axes
  svg += "<rect x=\"" + num(PlotStyle::left) + "\" y=\"" + num(PlotStyle::top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  if (xmin < 0 && xmax > 0)
    svg += "<line x1=\"" + num(sx(0)) + "\" y1=\"" + num(PlotStyle::top) + "\" x2=\"" + num(sx(0)) + "\" y2=\"" +
           num(PlotStyle::top + plot_h) + "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  if (ymin < 0 && ymax > 0)
    svg += "<line x1=\"" + num(PlotStyle::left) + "\" y1=\"" + num(sy(0)) + "\" x2=\"" + num(PlotStyle::left + plot_w) +
           "\" y2=\"" + num(sy(0)) + "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";

  char label[64];
  std::snprintf(label, sizeof(label), "Dim 1 (%.1f%%)", 100.0 * view.explained[0]);
  svg += "<text x=\"" + num(PlotStyle::left + plot_w / 2) + "\" y=\"" + num(PlotStyle::height - 20) +
         "\" text-anchor=\"middle\">" + label + "</text>\n";
  std::snprintf(label, sizeof(label), "Dim 2 (%.1f%%)", 100.0 * view.explained[1]);
  svg += "<text x=\"22\" y=\"" + num(PlotStyle::top + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 22 " +
         num(PlotStyle::top + plot_h / 2) + ")\">" + label + "</text>\n";

  svg += "<g id=\"ellipses\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (const auto& ce : view.ellipses) {
    if (!ce.ellipse) {
      svg += "<!-- warning: cluster " + std::to_string(ce.label) + " drawn without ellipse (" +
             detail::comment_safe(ce.note) + ") -->\n";
      continue;
    }
    const auto& e = *ce.ellipse;
    const double cx = sx(e.center[0]), cy = sy(e.center[1]);
    const double degrees = -e.angle * 180.0 / std::numbers::pi;
    svg += "<ellipse cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" rx=\"" + num(scale * e.semi_axes[0]) + "\" ry=\"" +
           num(scale * e.semi_axes[1]) + "\" transform=\"rotate(" + num(degrees) + " " + num(cx) + " " + num(cy) +
           ")\" stroke=\"" + std::string(detail::cluster_color(ce.label)) + "\"/>\n";
  }
  svg += "</g>\n";

  svg += "<g id=\"points\" fill-opacity=\"0.85\">\n";
  for (std::size_t i = 0; i < view.points.size(); ++i) {
    svg += "<circle cx=\"" + num(sx(view.points[i][0])) + "\" cy=\"" + num(sy(view.points[i][1])) + "\" r=\"" +
           num(PlotStyle::point_radius) + "\" fill=\"" + std::string(detail::cluster_color(view.labels[i])) +
           "\"><title>" + detail::xml_escape(view.session_ids[i]) + "</title></circle>\n";
  }
  svg += "</g>\n";

  const double lx = PlotStyle::width - PlotStyle::right + 15;
  double ly = PlotStyle::top + 10;
  svg += "<g id=\"legend\">\n";
  for (int c = 1; c <= view.k; ++c) {
    std::size_t size = static_cast<std::size_t>(std::count(view.labels.begin(), view.labels.end(), c));
    svg += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"12\" height=\"12\" fill=\"" +
           std::string(detail::cluster_color(c)) + "\"/>\n";
    svg += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly + 10) + "\">Cluster " + std::to_string(c) + " (n=" +
           std::to_string(size) + ")</text>\n";
    ly += 20;
  }
  char level[32];
  std::snprintf(level, sizeof(level), "%g%%", 100.0 * view.level);
  svg += "<text x=\"" + num(lx) + "\" y=\"" + num(ly + 12) + "\" font-size=\"10\">Ellipses: " + level +
         " concentration</text>\n";
  svg += "<text x=\"" + num(lx) + "\" y=\"" + num(ly + 25) + "\" font-size=\"10\">ellipses (chi-square,</text>\n";
  svg += "<text x=\"" + num(lx) + "\" y=\"" + num(ly + 38) + "\" font-size=\"10\">2 d.o.f.) of scores</text>\n";
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace sessiontypo
