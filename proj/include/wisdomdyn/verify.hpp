#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wisdomdyn/graph.hpp"
#include "wisdomdyn/learning.hpp"
#include "wisdomdyn/opinion.hpp"
#include "wisdomdyn/random.hpp"

namespace wisdomdyn {

// Random instance generators shared by the invariant suite and the tests.

/// Strongly connected digraph on n nodes: a random Hamiltonian cycle plus
/// each remaining ordered pair with probability `density`. Weights are drawn
/// from [0.2, 2]; with `self_loops` every node also gets one.
WeightedDigraph random_strongly_connected_graph(StreamRng& rng, std::size_t n, double density,
                                                bool self_loops);

/// Variances drawn log-uniformly from [0.1, 10].
Vector random_variances(StreamRng& rng, std::size_t n);

/// Profile drawn log-uniformly from [lo, hi].
SusceptibilityProfile random_profile(StreamRng& rng, std::size_t n, double lo, double hi);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // the statistic compared against `threshold`
  double threshold = 0.0;
  std::string detail;
};

struct VerifySettings {
  std::uint64_t seed = 1;
  std::size_t random_instances = 1000;
  std::size_t gradient_samples = 100;
  std::size_t learn_runs = 5;
  std::size_t ode_instances = 10;
  std::size_t monte_carlo_trials = 200'000;
  std::size_t threads = 0;
};

/// Inputs describing one configured experiment.
struct VerifyTarget {
  WeightedDigraph social_graph;  // already normalized
  LearningProblem problem;
  double theta = 0.0;
  SusceptibilityProfile z0;
};

/// Runs every invariant check: centrality residual, gradient against finite
/// differences, the variance lower bound, equilibria versus the optimal ray,
/// hull monotonicity and convergence of learning runs, Monte Carlo against
/// the closed-form variance, and the simulated consensus against its
/// closed-form prediction.
std::vector<CheckResult> run_invariant_suite(const VerifyTarget& target,
                                             const VerifySettings& settings);

/// Central difference of local_utility in z_i with step 1e-6 * z_i.
double finite_difference_gradient(std::size_t i, const SusceptibilityProfile& z,
                                  const LearningProblem& p);

}  // namespace wisdomdyn
