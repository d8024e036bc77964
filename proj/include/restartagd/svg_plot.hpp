#pragma once

#include <string>
#include <vector>

#include "restartagd/report.hpp"

namespace restartagd {

struct PlotSeries {
  std::string label;
  std::vector<TraceRecord> rows;
};

struct PlotOptions {
  int panel_width = 480;
  int panel_height = 360;
  std::string title;
};

/// Self-contained SVG with two panels sharing the n_oracle axis: f(x_k)
/// (log10 scale when every value is positive, linear otherwise) and the
/// gradient norm (the smaller of the monitor
/// and the averaged-point norm) on a log10 scale. One polyline per series
/// and panel, or a single marker for one-row series; a legend lists every
/// series. Throws ParamError when there is nothing to plot.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

void write_svg(const std::string& path, const std::vector<PlotSeries>& series, const PlotOptions& options = {});

}  // namespace restartagd
