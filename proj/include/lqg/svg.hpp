#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lqg {

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color = "#1f6fb2";
};

struct SvgStyle {
  int width = 640;
  int height = 480;
  bool log_x = false;
  bool log_y = false;
  std::string title;
  // slope/intercept of a fitted line drawn over the data (in the log domain
  // when the axes are logarithmic); the slope is annotated in the legend
  std::optional<std::pair<double, double>> fit;
};

// Standalone SVG scatter/line plot; byte-identical output for identical
// inputs.
std::string emit_svg(const std::vector<SvgSeries>& series, const SvgStyle& style);

void emit_svg_file(const std::vector<SvgSeries>& series, const SvgStyle& style,
                   const std::string& filename);

}  // namespace lqg
