#pragma once

// Minimal self-contained SVG line charts.

#include <filesystem>
#include <string>
#include <vector>

namespace hqc {

struct ChartLine {
  std::string label;
  std::vector<double> y;
  bool dashed = false;
};

struct Chart {
  std::string x_label = "t";
  std::string y_label = "dispersion";
  std::vector<double> x;
  std::vector<ChartLine> lines;
};

/// Renders one chart with a polyline per line. Output bytes depend only on
/// the input. Throws ErrorCode::invalid_argument for empty or ragged series.
std::string render_svg(const Chart& chart);

/// render_svg to a file; ErrorCode::io when the path is not writable.
void emit_figures(const Chart& chart, const std::filesystem::path& path);

}  // namespace hqc
