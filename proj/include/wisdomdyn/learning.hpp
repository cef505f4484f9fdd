#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "wisdomdyn/graph.hpp"
#include "wisdomdyn/ode.hpp"
#include "wisdomdyn/opinion.hpp"

namespace wisdomdyn {

/// Data shared by all agents of the susceptibility learning dynamics: the
/// learning graph (who exchanges parameters with whom), the centrality of the
/// social graph and the observation variances.
///
/// Construction enforces that every agent has in-edges (IsolatedAgent), a
/// positive self-loop (MissingSelfLoop) and that the learning graph is
/// strongly connected (NotStronglyConnected).
class LearningProblem {
 public:
  LearningProblem(WeightedDigraph learning_graph, CentralityVector mu, Vector sigma2);

  const WeightedDigraph& learning_graph() const { return graph_; }
  const CentralityVector& mu() const { return mu_; }
  const Vector& sigma2() const { return sigma2_; }
  std::size_t size() const { return graph_.size(); }

 private:
  WeightedDigraph graph_;
  CentralityVector mu_;
  Vector sigma2_;
};

/// Change of coordinates y_i = mu_i sigma2_i / z_i. The optimal ray maps onto
/// the consensus line y = c 1.
class YState {
 public:
  explicit YState(Vector values);

  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

 private:
  Vector values_;
};

YState to_y(const SusceptibilityProfile& z, const CentralityVector& mu, const Vector& sigma2);
SusceptibilityProfile from_y(const YState& y, const CentralityVector& mu, const Vector& sigma2);

/// Local variance estimate of agent i over its learning-graph neighborhood:
///   u_i(z) = (sum_j Wb(i,j) mu_j / z_j)^-2 * sum_k Wb(i,k) mu_k^2 sigma2_k / z_k^2
double local_utility(std::size_t i, const SusceptibilityProfile& z, const LearningProblem& p);

/// Partial derivative of u_i with respect to z_i (closed form). Vanishes when
/// Wb(i, i) == 0.
double utility_gradient(std::size_t i, const SusceptibilityProfile& z, const LearningProblem& p);

/// z_i' = -du_i/dz_i for all agents.
Vector z_rhs(const SusceptibilityProfile& z, const LearningProblem& p);

/// Nonlinear coupling weights of the learning dynamics in y coordinates:
///   m(i,j) = 2 y_i^4 y_j Wb(i,i) Wb(i,j) / (mu_i^2 sigma2_i^3 sigma2_j)
///            * (sum_k Wb(i,k) y_k / sigma2_k)^-3
/// m(i,j) > 0 exactly when Wb(i,j) > 0.
Matrix coupling_matrix(const YState& y, const LearningProblem& p);

/// y_i' = sum_j m(i,j) (y_j - y_i).
Vector y_rhs(const YState& y, const LearningProblem& p);

/// True iff ||z_rhs(z)||_inf < tol.
bool equilibrium_check(const SusceptibilityProfile& z, const LearningProblem& p, double tol);

/// (max y - min y) / mean y.
double relative_spread(const Vector& y);

enum class Coordinates { z_space, y_space };

std::string_view to_string(Coordinates c);
Coordinates parse_coordinates(std::string_view name);

struct LearnSettings {
  IntegratorOptions integrator{IntegrationMethod::rk45_adaptive, 1e-2, 1e-8, 1e-10, 1e6,
                               2'000'000, 1};
  Coordinates coordinates = Coordinates::y_space;
  double convergence_threshold = 1e-8;  // on relative_spread of y
  double hull_tolerance = 1e-6;         // relative slack before HullViolation
  double monotone_slack = 1e-9;         // relative slack for the hull monotonicity diagnostic
};

struct LearnDiagnostics {
  // Per recorded step.
  std::vector<double> y_min;
  std::vector<double> y_max;
  double hull_lower = 0.0;  // min y(0)
  double hull_upper = 0.0;  // max y(0)
  double final_spread = 0.0;
  double zeta = 0.0;  // mean of the terminal y
  double distance_to_optimal = 0.0;
  bool converged = false;
  // max y never rose and min y never fell across accepted steps.
  bool hull_monotone = true;
  // z and y stayed strictly positive at every accepted step.
  bool strictly_positive = true;
  double worst_monotone_violation = 0.0;  // relative, over accepted steps
  Termination terminated_by = Termination::t_end_reached;
};

struct LearnResult {
  Trajectory z_trajectory;
  Trajectory y_trajectory;
  SusceptibilityProfile z_limit;
  LearnDiagnostics diagnostics;
};

/// Integrates the gradient-flow learning dynamics from z0 until the relative
/// y-spread drops below settings.convergence_threshold or the horizon ends.
///
/// Both trajectories are always returned, converted from whichever coordinates
/// were integrated. Throws HullViolation if some y_i leaves
/// [min y(0), max y(0)] by more than the hull tolerance (or, with the fixed
/// step method, if a step proposes a nonpositive state), and StepFailure /
/// MaxStepsExceeded for integrator breakdowns.
LearnResult learn(const SusceptibilityProfile& z0, const LearningProblem& p,
                  const LearnSettings& settings = {});

}  // namespace wisdomdyn
