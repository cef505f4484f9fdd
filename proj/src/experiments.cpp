#include "wisdomdyn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "wisdomdyn/io.hpp"
#include "wisdomdyn/random.hpp"

namespace wisdomdyn {

namespace {

constexpr std::size_t kAgents = 6;
constexpr double kConsensusThreshold = 1e-8;
constexpr double kGroupTolerance = 1e-6;

std::vector<Edge> undirected_edges(std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<Edge> edges;
  for (const auto& [a, b] : pairs) {
    edges.push_back(Edge{static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1), 1.0});
  }
  return edges;
}

bool near(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

void sort_groups(std::vector<std::vector<std::size_t>>& groups) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

nlohmann::json groups_to_json(const std::vector<std::vector<std::size_t>>& groups) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json members = nlohmann::json::array();
    for (const std::size_t i : g) members.push_back(i + 1);
    out.push_back(members);
  }
  return out;
}

LearnResult run_example(const SusceptibilityProfile& z0) {
  const PaperExample ex = build_paper_example();
  return learn(z0, make_learning_problem(ex));
}

}  // namespace

PaperExample build_paper_example() {
  const WeightedDigraph g = WeightedDigraph::from_edges(
      kAgents,
      undirected_edges({{1, 4}, {1, 6}, {2, 3}, {2, 4}, {2, 5}, {3, 4}, {4, 5}, {5, 6}}),
      /*undirected=*/true);
  const WeightedDigraph g_bar = WeightedDigraph::from_edges(
      kAgents, undirected_edges({{1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}}),
      /*undirected=*/true, /*self_loop_weight=*/1.0);
  Vector sigma2(kAgents);
  sigma2 << 1.0, 1.1, 1.0, 1.2, 1.1, 1.0;
  const Normalization mode = Normalization::row_stochastic;
  return PaperExample{g, g_bar, centrality(normalized(g, mode)), sigma2, mode};
}

LearningProblem make_learning_problem(const PaperExample& ex) {
  return LearningProblem(ex.g_bar, ex.mu, ex.sigma2);
}

SusceptibilityProfile sample_initial_profile(std::size_t n, std::uint64_t seed, double lo,
                                             double hi) {
  StreamRng rng(seed, 0);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  Vector z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std::exp(rng.uniform(log_lo, log_hi));
  return SusceptibilityProfile(std::move(z));
}

std::vector<std::vector<std::size_t>> cluster_by_value(const Vector& values, double rel_tol) {
  std::vector<std::size_t> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values(static_cast<Eigen::Index>(a)) < values(static_cast<Eigen::Index>(b));
  });
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = values(static_cast<Eigen::Index>(order[k]));
    if (k == 0 || !near(values(static_cast<Eigen::Index>(order[k - 1])), v, rel_tol)) {
      groups.emplace_back();
    }
    groups.back().push_back(order[k]);
  }
  sort_groups(groups);
  return groups;
}

std::vector<std::vector<std::size_t>> parameter_groups(const CentralityVector& mu,
                                                       const Vector& sigma2) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> taken(mu.size(), false);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (taken[i]) continue;
    groups.push_back({i});
    for (std::size_t j = i + 1; j < mu.size(); ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (!taken[j] && near(mu[i], mu[j], 1e-12) && near(sigma2(ii), sigma2(jj), 1e-12)) {
        taken[j] = true;
        groups.back().push_back(j);
      }
    }
  }
  return groups;
}

FigureYReport reproduce_figure_y(std::uint64_t seed,
                                 const std::optional<std::filesystem::path>& out_dir) {
  SusceptibilityProfile z0 = sample_initial_profile(kAgents, seed);
  FigureYReport report{run_example(z0), std::move(z0)};
  const LearnDiagnostics& d = report.run.diagnostics;
  report.consensus = d.final_spread < kConsensusThreshold;
  report.hull_monotone = d.hull_monotone;
  report.zeta_in_hull = d.zeta >= d.hull_lower && d.zeta <= d.hull_upper;

  if (out_dir) {
    write_trajectory_csv(*out_dir / "figure_y.csv", report.run.y_trajectory, "y");
    write_text_file(*out_dir / "figure_y.svg",
                    render_line_chart_svg(report.run.y_trajectory,
                                          {"Learning dynamics in y coordinates", "t", "y_i(t)",
                                           "y"}));
  }
  return report;
}

FigureZReport reproduce_figure_z(std::uint64_t seed,
                                 const std::optional<std::filesystem::path>& out_dir) {
  const PaperExample ex = build_paper_example();
  SusceptibilityProfile z0 = sample_initial_profile(kAgents, seed);
  LearnResult run = run_example(z0);

  FigureZReport report{std::move(run), std::move(z0), {}, {}};
  const Vector& z_end = report.run.z_limit.values();
  report.groups = cluster_by_value(z_end, kGroupTolerance);
  report.expected_groups = parameter_groups(ex.mu, ex.sigma2);
  report.groups_match = report.groups == report.expected_groups;
  for (const auto& g : report.expected_groups) {
    double lo = z_end(static_cast<Eigen::Index>(g.front()));
    double hi = lo;
    for (const std::size_t i : g) {
      lo = std::min(lo, z_end(static_cast<Eigen::Index>(i)));
      hi = std::max(hi, z_end(static_cast<Eigen::Index>(i)));
    }
    report.max_within_group_spread = std::max(report.max_within_group_spread, (hi - lo) / hi);
  }

  if (out_dir) {
    write_trajectory_csv(*out_dir / "figure_z.csv", report.run.z_trajectory, "z");
    write_text_file(*out_dir / "figure_z.svg",
                    render_line_chart_svg(report.run.z_trajectory,
                                          {"Learning dynamics in z coordinates", "t", "z_i(t)",
                                           "z"}));
    nlohmann::json doc;
    doc["seed"] = seed;
    doc["groups"] = groups_to_json(report.groups);
    doc["expected_groups"] = groups_to_json(report.expected_groups);
    doc["groups_match"] = report.groups_match;
    doc["max_within_group_spread"] = report.max_within_group_spread;
    doc["z_limit"] = std::vector<double>(z_end.data(), z_end.data() + z_end.size());
    doc["zeta"] = report.run.diagnostics.zeta;
    write_text_file(*out_dir / "groups.json", doc.dump(2) + "\n");
  }
  return report;
}

}  // namespace wisdomdyn
