#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bwl/report.hpp"

namespace bwl::lab {

struct FittedLine {
  double slope = 0.0;
  double intercept = 0.0;  // natural log of the value at x = 1
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::string label;
};

struct LogLogPlot {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  std::optional<FittedLine> fit;
};

/// Standalone SVG document. Non-positive or non-finite points are skipped.
std::string render_loglog(const Table& table, const LogLogPlot& plot);

}  // namespace bwl::lab
