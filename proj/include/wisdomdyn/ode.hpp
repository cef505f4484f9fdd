#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wisdomdyn/graph.hpp"

namespace wisdomdyn {

enum class IntegrationMethod { rk4_fixed, rk45_adaptive };

enum class Termination { t_end_reached, predicate_satisfied, max_steps_exceeded, step_failure };

std::string_view to_string(IntegrationMethod method);
std::string_view to_string(Termination termination);
IntegrationMethod parse_integration_method(std::string_view name);

struct IntegratorOptions {
  IntegrationMethod method = IntegrationMethod::rk45_adaptive;
  double dt = 1e-2;  // fixed step, or initial step for the adaptive method
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_end = 100.0;
  std::size_t max_steps = 1'000'000;  // attempted steps, rejected ones included
  std::size_t record_every = 1;

  /// Throws InvalidArgument if any field is out of range.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  Termination terminated_by = Termination::t_end_reached;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  double final_time() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }
  std::size_t size() const { return times.size(); }
};

using RhsFunction = std::function<Vector(double, const Vector&)>;
using StopPredicate = std::function<bool(double, const Vector&)>;
using StateFilter = std::function<bool(const Vector&)>;

/// Integrates x' = rhs(t, x) from t = 0 to opts.t_end.
///
/// rk4_fixed takes steps of opts.dt (the last one shortened to land on t_end).
/// rk45_adaptive uses the Dormand-Prince 5(4) pair and accepts a step when
/// the embedded error satisfies |e_i| <= atol + rtol * ||x||_inf for all i.
///
/// Failures are reported through Trajectory::terminated_by rather than thrown
/// so that callers keep the partial trajectory; see require_success().
Trajectory integrate(const RhsFunction& rhs, const Vector& x0, const IntegratorOptions& opts);

/// As integrate(), but evaluates `stop` on the initial state and on every
/// accepted step; the first hit ends the run with predicate_satisfied and is
/// always recorded.
///
/// `admissible`, when set, vets every proposed step: the adaptive method
/// rejects and halves the step, the fixed method ends with step_failure.
Trajectory integrate_until(const RhsFunction& rhs, const Vector& x0,
                           const IntegratorOptions& opts, const StopPredicate& stop,
                           const StateFilter& admissible = {});

/// Throws StepFailure or MaxStepsExceeded if the trajectory ended that way.
void require_success(const Trajectory& trajectory);

}  // namespace wisdomdyn
