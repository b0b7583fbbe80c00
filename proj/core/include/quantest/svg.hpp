#pragma once

#include <string>
#include <vector>

namespace quantest {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Single-panel line chart on log-log axes. Non-positive points are
/// skipped.
std::string render_loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label);

}  // namespace quantest
