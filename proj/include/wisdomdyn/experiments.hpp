#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "wisdomdyn/graph.hpp"
#include "wisdomdyn/learning.hpp"
#include "wisdomdyn/opinion.hpp"

namespace wisdomdyn {

/// The six-agent example: a social graph, a learning graph with unit
/// self-loops, per-agent variances and the centrality of the normalized
/// social graph.
struct PaperExample {
  WeightedDigraph g;      // social graph as drawn, unit weights
  WeightedDigraph g_bar;  // learning graph, unit weights and unit self-loops
  CentralityVector mu;
  Vector sigma2;
  Normalization normalization;
};

PaperExample build_paper_example();

LearningProblem make_learning_problem(const PaperExample& ex);

/// z0 with components drawn log-uniformly from (lo, hi), stream 0 of `seed`.
SusceptibilityProfile sample_initial_profile(std::size_t n, std::uint64_t seed, double lo = 0.5,
                                             double hi = 2.0);

/// Partitions agents into groups whose values agree within `rel_tol`
/// (relative to the larger magnitude), chaining through sorted order. Groups
/// are listed by their smallest member, members in ascending order.
std::vector<std::vector<std::size_t>> cluster_by_value(const Vector& values, double rel_tol);

/// Groups agents sharing both mu_i and sigma2_i (to 1e-12 relative).
std::vector<std::vector<std::size_t>> parameter_groups(const CentralityVector& mu,
                                                       const Vector& sigma2);

struct FigureYReport {
  LearnResult run;
  SusceptibilityProfile z0;
  bool consensus = false;        // terminal relative y-spread < 1e-8
  bool hull_monotone = false;
  bool zeta_in_hull = false;
};

struct FigureZReport {
  LearnResult run;
  SusceptibilityProfile z0;
  std::vector<std::vector<std::size_t>> groups;           // clustered terminal z
  std::vector<std::vector<std::size_t>> expected_groups;  // by (mu, sigma2)
  double max_within_group_spread = 0.0;                   // relative
  bool groups_match = false;
};

/// Learns from sample_initial_profile(6, seed) on the example and, when
/// `out_dir` is given, writes figure_y.csv and figure_y.svg there.
FigureYReport reproduce_figure_y(std::uint64_t seed,
                                 const std::optional<std::filesystem::path>& out_dir = {});

/// Same run viewed in z; writes figure_z.csv, figure_z.svg and groups.json.
FigureZReport reproduce_figure_z(std::uint64_t seed,
                                 const std::optional<std::filesystem::path>& out_dir = {});

}  // namespace wisdomdyn
