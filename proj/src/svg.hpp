#pragma once

#include <string>
#include <utility>
#include <vector>

namespace permwalk::cli {

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  std::vector<PlotSeries> series;                    // log-log panel
  std::vector<double> ratio_x, ratio_y;              // measured / predicted
  std::vector<std::pair<double, std::string>> marks;  // vertical annotations
};

// Static SVG, two panels. Output depends only on the spec.
std::string render_svg(const PlotSpec& spec);

}  // namespace permwalk::cli
