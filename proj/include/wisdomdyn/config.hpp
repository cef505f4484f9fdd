#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "wisdomdyn/graph.hpp"
#include "wisdomdyn/learning.hpp"
#include "wisdomdyn/ode.hpp"
#include "wisdomdyn/opinion.hpp"

namespace wisdomdyn {

inline constexpr const char* kToolVersion = "0.1.0";

/// Either explicit values or a seeded log-uniform draw from [lo, hi].
struct ProfileSpec {
  std::optional<Vector> values;
  std::uint64_t seed = 1;
  double lo = 0.5;
  double hi = 2.0;
};

struct MonteCarloSpec {
  std::size_t trials = 100'000;
  std::uint64_t seed = 1;
  NoiseDistribution distribution = NoiseDistribution::gaussian;
};

/// A parsed experiment file. Graph specs read
///   {"n": 6, "edges": [[from, to, weight], ...], "undirected": true, "self_loops": 1.0}
/// with 1-based ids; [from, to, w] means `from` influences `to`. The weight
/// may be omitted (defaults to 1) and n defaults to the largest id.
struct ExperimentConfig {
  ExperimentConfig(nlohmann::json source_, WeightedDigraph social, WeightedDigraph learning,
                   Vector sigma2_)
      : source(std::move(source_)),
        social_graph(std::move(social)),
        learning_graph(std::move(learning)),
        sigma2(std::move(sigma2_)) {}

  nlohmann::json source;
  WeightedDigraph social_graph;    // as given, before normalization
  WeightedDigraph learning_graph;  // defaults to social_graph plus unit self-loops
  Vector sigma2;
  double theta = 0.0;
  Normalization normalization = Normalization::raw;
  ProfileSpec z0;
  std::optional<Vector> x0;  // opinions for `simulate`; drawn from the noise model if absent
  std::uint64_t seed = 1;
  IntegratorOptions integrator;
  Coordinates coordinates = Coordinates::y_space;
  MonteCarloSpec montecarlo;
  std::filesystem::path output_dir = "wisdomdyn_out";

  /// Social graph after applying `normalization`.
  WeightedDigraph opinion_graph() const;
  CentralityVector mu() const;
  LearningProblem learning_problem() const;
  SusceptibilityProfile initial_profile() const;
  /// x0 if given, else theta plus one noise draw per agent from `seed`.
  Vector initial_opinions() const;
  /// Replaces every seed that is in use (profile draw, opinions, Monte Carlo).
  void override_seed(std::uint64_t new_seed);
};

/// Throws ConfigError (or the library's validation errors) on bad input.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

Normalization parse_normalization(std::string_view name);
std::string_view to_string(Normalization n);

nlohmann::json to_json(const IntegratorOptions& opts);

}  // namespace wisdomdyn
