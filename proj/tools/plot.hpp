#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace acmri::tools {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Fixed palette, series i gets color i mod size.
const std::vector<std::array<unsigned char, 3>>& plot_palette();

// Axes, light grid, one polyline with point markers per series. No text:
// the caller records axis ranges and series colors next to the image.
struct PlotRange {
  double x_min, x_max, y_min, y_max;
};
PlotRange line_plot(const std::filesystem::path& path, const std::vector<Series>& series, int width = 480,
                    int height = 320);

}  // namespace acmri::tools
