#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crossflow/csv.hpp"
#include "crossflow/vec2.hpp"

namespace crossflow {

// Minimal static SVG line plots; enough for demand curves and time series.

struct PlotSeries {
  std::string label;
  std::vector<Vec2> points;  // x ascending
};

namespace plot_detail {

inline const char* series_color(std::size_t i) {
  static constexpr const char* kPalette[] = {
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
      "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};
  return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

// Tick spacing of the form {1, 2, 5} * 10^k covering roughly `target` steps.
inline double nice_step(double range, int target) {
  if (range <= 0.0) return 1.0;
  const double raw = range / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step = 10.0;
  if (norm <= 1.0) step = 1.0;
  else if (norm <= 2.0) step = 2.0;
  else if (norm <= 5.0) step = 5.0;
  return step * mag;
}

inline void append_attr(std::string& out, const char* name, double v) {
  out += ' ';
  out += name;
  out += "=\"";
  append_g6(out, v);
  out += '"';
}

inline void append_text(std::string& out, double x, double y, const std::string& text,
                        const char* anchor, double size, const char* extra = "") {
  out += "<text";
  append_attr(out, "x", x);
  append_attr(out, "y", y);
  out += " text-anchor=\"";
  out += anchor;
  out += "\" font-size=\"";
  append_g6(out, size);
  out += "\" font-family=\"sans-serif\"";
  out += extra;
  out += '>';
  out += text;
  out += "</text>\n";
}

}  // namespace plot_detail

inline std::string line_plot_svg(const std::string& title,
                                 const std::string& x_label,
                                 const std::string& y_label,
                                 const std::vector<PlotSeries>& series) {
  constexpr double kWidth = 840.0;
  constexpr double kHeight = 520.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 180.0;  // room for the legend
  constexpr double kTop = 50.0;
  constexpr double kBottom = 60.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (const Vec2 p : s.points) {
      if (first) {
        x_min = x_max = p.x;
        y_min = y_max = p.y;
        first = false;
      } else {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
      }
    }
  }
  if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
  y_min = std::min(y_min, 0.0);  // anchor value axes at zero
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
  y_max += 0.05 * (y_max - y_min);

  const auto sx = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto sy = [&](double y) {
    return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"520\" "
         "viewBox=\"0 0 840 520\">\n";
  svg += "<rect width=\"840\" height=\"520\" fill=\"white\"/>\n";
  plot_detail::append_text(svg, kLeft + plot_w / 2.0, 28.0, title, "middle", 17.0,
                           " font-weight=\"bold\"");

  // grid + ticks
  const double x_step = plot_detail::nice_step(x_max - x_min, 8);
  const double y_step = plot_detail::nice_step(y_max - y_min, 6);
  for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9; x += x_step) {
    const double px = sx(x);
    svg += "<line stroke=\"#dddddd\" stroke-width=\"1\"";
    plot_detail::append_attr(svg, "x1", px);
    plot_detail::append_attr(svg, "y1", kTop);
    plot_detail::append_attr(svg, "x2", px);
    plot_detail::append_attr(svg, "y2", kTop + plot_h);
    svg += "/>\n";
    plot_detail::append_text(svg, px, kTop + plot_h + 20.0, format_g6(x), "middle", 12.0);
  }
  for (double y = std::ceil(y_min / y_step) * y_step; y <= y_max + 1e-9; y += y_step) {
    const double py = sy(y);
    svg += "<line stroke=\"#dddddd\" stroke-width=\"1\"";
    plot_detail::append_attr(svg, "x1", kLeft);
    plot_detail::append_attr(svg, "y1", py);
    plot_detail::append_attr(svg, "x2", kLeft + plot_w);
    plot_detail::append_attr(svg, "y2", py);
    svg += "/>\n";
    plot_detail::append_text(svg, kLeft - 8.0, py + 4.0, format_g6(y), "end", 12.0);
  }

  // axes
  svg += "<rect fill=\"none\" stroke=\"black\" stroke-width=\"1\"";
  plot_detail::append_attr(svg, "x", kLeft);
  plot_detail::append_attr(svg, "y", kTop);
  plot_detail::append_attr(svg, "width", plot_w);
  plot_detail::append_attr(svg, "height", plot_h);
  svg += "/>\n";
  plot_detail::append_text(svg, kLeft + plot_w / 2.0, kHeight - 14.0, x_label,
                           "middle", 14.0);
  {
    std::string rot = " transform=\"rotate(-90 20 " + format_g6(kTop + plot_h / 2.0) +
                      ")\"";
    plot_detail::append_text(svg, 20.0, kTop + plot_h / 2.0, y_label, "middle", 14.0,
                             rot.c_str());
  }

  // series
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.points.empty()) continue;
    svg += "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"";
    svg += plot_detail::series_color(i);
    svg += "\" points=\"";
    for (const Vec2 p : s.points) {
      append_g6(svg, sx(p.x));
      svg += ',';
      append_g6(svg, sy(p.y));
      svg += ' ';
    }
    svg += "\"/>\n";
    for (const Vec2 p : s.points) {
      svg += "<circle r=\"3\" fill=\"";
      svg += plot_detail::series_color(i);
      svg += '"';
      plot_detail::append_attr(svg, "cx", sx(p.x));
      plot_detail::append_attr(svg, "cy", sy(p.y));
      svg += "/>\n";
    }
    // legend entry
    const double ly = kTop + 10.0 + 22.0 * static_cast<double>(i);
    svg += "<line stroke-width=\"3\" stroke=\"";
    svg += plot_detail::series_color(i);
    svg += '"';
    plot_detail::append_attr(svg, "x1", kLeft + plot_w + 14.0);
    plot_detail::append_attr(svg, "y1", ly);
    plot_detail::append_attr(svg, "x2", kLeft + plot_w + 44.0);
    plot_detail::append_attr(svg, "y2", ly);
    svg += "/>\n";
    plot_detail::append_text(svg, kLeft + plot_w + 50.0, ly + 4.0, s.label, "start",
                             12.0);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace crossflow
