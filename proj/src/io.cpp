#include "wisdomdyn/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wisdomdyn/error.hpp"

namespace wisdomdyn {

namespace {

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::string& prefix) {
  std::ostringstream out;
  out << 't';
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out << ',' << prefix << '_' << (i + 1);
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(traj.states[k](i));
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::string render_line_chart_svg(const Trajectory& traj, const ChartOptions& opts) {
  const double left = 70, right = 130, top = 40, bottom = 50;
  const double plot_w = opts.width - left - right;
  const double plot_h = opts.height - top - bottom;

  double t_min = traj.times.front();
  double t_max = traj.times.back();
  double v_min = traj.states.front().minCoeff();
  double v_max = traj.states.front().maxCoeff();
  for (const Vector& s : traj.states) {
    v_min = std::min(v_min, s.minCoeff());
    v_max = std::max(v_max, s.maxCoeff());
  }
  if (t_max <= t_min) t_max = t_min + 1.0;
  if (v_max <= v_min) {
    v_max += 0.5 * std::max(1.0, std::abs(v_max));
    v_min -= 0.5 * std::max(1.0, std::abs(v_min));
  }
  const double pad = 0.05 * (v_max - v_min);
  v_min -= pad;
  v_max += pad;

  auto px = [&](double t) { return left + plot_w * (t - t_min) / (t_max - t_min); };
  auto py = [&](double v) { return top + plot_h * (1.0 - (v - v_min) / (v_max - v_min)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << opts.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(opts.title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int k = 0; k <= kTicks; ++k) {
    const double t = t_min + (t_max - t_min) * k / kTicks;
    const double v = v_min + (v_max - v_min) * k / kTicks;
    svg << "<line x1=\"" << px(t) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(t)
        << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(t) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\">" << short_number(t) << "</text>\n";
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << left << "\" y2=\""
        << py(v) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
        << short_number(v) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << opts.height - 10
      << "\" text-anchor=\"middle\">" << escape_xml(opts.x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << top + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(opts.y_label) << "</text>\n";

  const Eigen::Index n = traj.states.front().size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const char* color = kPalette[static_cast<std::size_t>(i) % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (k) svg << ' ';
      svg << px(traj.times[k]) << ',' << py(traj.states[k](i));
    }
    svg << "\"/>\n";
    const double ly = top + 10 + 18 * static_cast<double>(i);
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\""
        << left + plot_w + 32 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly + 4 << "\">"
        << escape_xml(opts.series_prefix) << '_' << (i + 1) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace wisdomdyn
