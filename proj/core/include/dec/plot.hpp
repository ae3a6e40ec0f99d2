#pragma once

#include <string>
#include <vector>

namespace dec {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Log-log chart with one polyline + markers per series and dashed guide lines
// of the given slopes anchored at the first point of the first series.
struct LogLogPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::vector<double> guide_slopes{1.0, 2.0};
};

// Standalone SVG document. Non-positive or non-finite points are skipped.
std::string render_loglog_svg(const LogLogPlot& plot);

}  // namespace dec
