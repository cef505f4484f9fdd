#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wisdomdyn/ode.hpp"

namespace wisdomdyn {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Writes `t,<prefix>_1,...,<prefix>_n` followed by one row per recorded state.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::string& prefix);

struct ChartOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  std::string series_prefix;  // legend entries read <prefix>_1, <prefix>_2, ...
  int width = 800;
  int height = 500;
};

/// Minimal SVG line chart: axes with tick labels, one polyline per state
/// component and a legend.
std::string render_line_chart_svg(const Trajectory& traj, const ChartOptions& opts);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace wisdomdyn
