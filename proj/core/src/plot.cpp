#include "dec/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace dec {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

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

bool usable(double x, double y) { return std::isfinite(x) && std::isfinite(y) && x > 0 && y > 0; }

struct Axes {
  double lx0, lx1, ly0, ly1;  // decade-aligned log10 ranges
  double px(double x) const { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (std::log10(y) - ly0) / (ly1 - ly0) * (kHeight - kTop - kBottom); }
};

}  // namespace

std::string render_loglog_svg(const LogLogPlot& plot) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!std::isfinite(xmin)) xmin = 0.1, xmax = 1.0, ymin = 0.1, ymax = 1.0;
  Axes ax{std::floor(std::log10(xmin)), std::ceil(std::log10(xmax)), std::floor(std::log10(ymin)),
          std::ceil(std::log10(ymax))};
  if (ax.lx1 <= ax.lx0) ax.lx1 = ax.lx0 + 1;
  if (ax.ly1 <= ax.ly0) ax.ly1 = ax.ly0 + 1;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     (kLeft + kWidth - kRight) / 2, escape(plot.title));

  // Grid and decade labels.
  for (double d = ax.lx0; d <= ax.lx1 + 1e-9; d += 1) {
    const double x = ax.px(std::pow(10.0, d));
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", x, kTop,
                       kHeight - kBottom);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">1e{}</text>\n", x, kHeight - kBottom + 18,
                       static_cast<int>(d));
  }
  for (double d = ax.ly0; d <= ax.ly1 + 1e-9; d += 1) {
    const double y = ax.py(std::pow(10.0, d));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n", kLeft, y,
                       kWidth - kRight);
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", kLeft - 6, y + 4,
                       static_cast<int>(d));
  }
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (kLeft + kWidth - kRight) / 2,
                     kHeight - 15, escape(plot.x_label));
  svg += fmt::format("<text transform=\"translate(20,{}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                     (kTop + kHeight - kBottom) / 2, escape(plot.y_label));

  double legend_y = kTop + 10;
  auto legend = [&](const std::string& color, const std::string& dash, const std::string& label) {
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>\n"
        "<text x=\"{5}\" y=\"{6:.2f}\">{7}</text>\n",
        kWidth - kRight + 10, legend_y, kWidth - kRight + 35, color, dash, kWidth - kRight + 40, legend_y + 4,
        escape(label));
    legend_y += 18;
  };

  // Reference slopes through the first usable point, spanning the x range.
  const PlotSeries* anchor = plot.series.empty() ? nullptr : &plot.series.front();
  if (anchor) {
    for (std::size_t i = 0; i < std::min(anchor->x.size(), anchor->y.size()); ++i) {
      if (!usable(anchor->x[i], anchor->y[i])) continue;
      for (double slope : plot.guide_slopes) {
        const double x0 = xmin, x1 = xmax;
        const double y0 = anchor->y[i] * std::pow(x0 / anchor->x[i], slope);
        const double y1 = anchor->y[i] * std::pow(x1 / anchor->x[i], slope);
        svg += fmt::format(
            "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n",
            ax.px(x0), ax.py(y0), ax.px(x1), ax.py(y1));
        legend("#888", " stroke-dasharray=\"5,4\"", fmt::format("slope {:g}", slope));
      }
      break;
    }
  }

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const std::string color = kColors[k % kColors.size()];
    std::string points;
    std::string markers;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", ax.px(s.x[i]), ax.py(s.y[i]));
      markers += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\"/>\n", ax.px(s.x[i]),
                             ax.py(s.y[i]), color);
    }
    if (!points.empty()) {
      points.pop_back();
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", points, color);
    }
    svg += markers;
    legend(color, "", s.label);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dec
