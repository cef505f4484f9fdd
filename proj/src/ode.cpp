#include "wisdomdyn/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wisdomdyn/error.hpp"

namespace wisdomdyn {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;

constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
// Fifth-order weights; also the last stage row (first same as last).
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// Fifth minus fourth order weights.
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kUnderflowRatio = 1e-12;

bool all_finite(const Vector& v) { return v.allFinite(); }

class Recorder {
 public:
  Recorder(Trajectory& out, std::size_t every) : out_(out), every_(every) {}

  void initial(double t, const Vector& x) {
    out_.times.push_back(t);
    out_.states.push_back(x);
  }

  void accepted(double t, const Vector& x) {
    ++out_.accepted_steps;
    pending_ = (out_.accepted_steps % every_) != 0;
    if (!pending_) {
      out_.times.push_back(t);
      out_.states.push_back(x);
    }
  }

  // Makes sure the last accepted state ends up in the trajectory.
  void finish(double t, const Vector& x, Termination why) {
    if (pending_) {
      out_.times.push_back(t);
      out_.states.push_back(x);
      pending_ = false;
    }
    out_.terminated_by = why;
  }

 private:
  Trajectory& out_;
  std::size_t every_;
  bool pending_ = false;
};

Trajectory run_rk4(const RhsFunction& rhs, const Vector& x0, const IntegratorOptions& opts,
                   const StopPredicate& stop, const StateFilter& admissible) {
  Trajectory out;
  Recorder rec(out, opts.record_every);
  rec.initial(0.0, x0);
  if (stop && stop(0.0, x0)) {
    out.terminated_by = Termination::predicate_satisfied;
    return out;
  }

  Vector x = x0;
  double t = 0.0;
  std::size_t attempts = 0;
  for (std::size_t k = 1; t < opts.t_end; ++k) {
    if (attempts++ >= opts.max_steps) {
      rec.finish(t, x, Termination::max_steps_exceeded);
      return out;
    }
    double t_next = static_cast<double>(k) * opts.dt;
    if (t_next > opts.t_end || opts.t_end - t_next < 1e-9 * opts.dt) t_next = opts.t_end;
    const double h = t_next - t;

    const Vector k1 = rhs(t, x);
    const Vector k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = rhs(t + h, x + h * k3);
    Vector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!all_finite(next) || (admissible && !admissible(next))) {
      rec.finish(t, x, Termination::step_failure);
      return out;
    }
    x = std::move(next);
    t = t_next;
    rec.accepted(t, x);
    if (stop && stop(t, x)) {
      rec.finish(t, x, Termination::predicate_satisfied);
      return out;
    }
  }
  rec.finish(t, x, Termination::t_end_reached);
  return out;
}

Trajectory run_dopri(const RhsFunction& rhs, const Vector& x0, const IntegratorOptions& opts,
                     const StopPredicate& stop, const StateFilter& admissible) {
  Trajectory out;
  Recorder rec(out, opts.record_every);
  rec.initial(0.0, x0);
  if (stop && stop(0.0, x0)) {
    out.terminated_by = Termination::predicate_satisfied;
    return out;
  }

  const double min_dt = opts.dt * kUnderflowRatio;
  Vector x = x0;
  double t = 0.0;
  double h = opts.dt;
  Vector k1 = rhs(t, x);
  std::size_t attempts = 0;

  while (t < opts.t_end) {
    if (attempts++ >= opts.max_steps) {
      rec.finish(t, x, Termination::max_steps_exceeded);
      return out;
    }
    if (h < min_dt) {
      rec.finish(t, x, Termination::step_failure);
      return out;
    }
    double t_next = t + h;
    if (t_next >= opts.t_end) t_next = opts.t_end;
    const double step = t_next - t;

    const Vector k2 = rhs(t + kC2 * step, x + step * (kA21 * k1));
    const Vector k3 = rhs(t + kC3 * step, x + step * (kA31 * k1 + kA32 * k2));
    const Vector k4 = rhs(t + kC4 * step, x + step * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Vector k5 =
        rhs(t + kC5 * step, x + step * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Vector k6 = rhs(t_next, x + step * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 +
                                              kA65 * k5));
    Vector next = x + step * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    Vector k7 = rhs(t_next, next);
    const Vector err_vec =
        step * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    // Scaled by the accepted state only: a blown-up proposal must not loosen
    // its own tolerance.
    const double scale = opts.atol + opts.rtol * x.cwiseAbs().maxCoeff();
    const double err = err_vec.cwiseAbs().maxCoeff() / scale;

    if (!std::isfinite(err) || !all_finite(next) || (admissible && !admissible(next))) {
      ++out.rejected_steps;
      h = step * 0.5;
      continue;
    }

    const double factor =
        err == 0.0 ? kMaxFactor
                   : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
    if (err > 1.0) {
      ++out.rejected_steps;
      h = step * factor;
      continue;
    }

    x = std::move(next);
    k1 = std::move(k7);
    t = t_next;
    // A step shortened to hit t_end should not shrink the controller's guess.
    h = std::max(h, step) * factor;
    rec.accepted(t, x);
    if (stop && stop(t, x)) {
      rec.finish(t, x, Termination::predicate_satisfied);
      return out;
    }
  }
  rec.finish(t, x, Termination::t_end_reached);
  return out;
}

}  // namespace

std::string_view to_string(IntegrationMethod method) {
  switch (method) {
    case IntegrationMethod::rk4_fixed: return "rk4_fixed";
    case IntegrationMethod::rk45_adaptive: return "rk45_adaptive";
  }
  return "unknown";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::t_end_reached: return "t_end_reached";
    case Termination::predicate_satisfied: return "predicate_satisfied";
    case Termination::max_steps_exceeded: return "max_steps_exceeded";
    case Termination::step_failure: return "step_failure";
  }
  return "unknown";
}

IntegrationMethod parse_integration_method(std::string_view name) {
  if (name == "rk4_fixed") return IntegrationMethod::rk4_fixed;
  if (name == "rk45_adaptive") return IntegrationMethod::rk45_adaptive;
  throw InvalidArgument("unknown integration method '" + std::string(name) + "'");
}

void IntegratorOptions::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(dt)) throw InvalidArgument("integrator dt must be positive");
  if (!positive(rtol)) throw InvalidArgument("integrator rtol must be positive");
  if (!positive(atol)) throw InvalidArgument("integrator atol must be positive");
  if (!positive(t_end)) throw InvalidArgument("integrator t_end must be positive");
  if (max_steps < 1) throw InvalidArgument("integrator max_steps must be at least 1");
  if (record_every < 1) throw InvalidArgument("integrator record_every must be at least 1");
}

Trajectory integrate(const RhsFunction& rhs, const Vector& x0, const IntegratorOptions& opts) {
  return integrate_until(rhs, x0, opts, StopPredicate{});
}

Trajectory integrate_until(const RhsFunction& rhs, const Vector& x0,
                           const IntegratorOptions& opts, const StopPredicate& stop,
                           const StateFilter& admissible) {
  opts.validate();
  if (x0.size() == 0) throw InvalidArgument("initial state is empty");
  if (!all_finite(x0)) throw InvalidArgument("initial state is not finite");
  switch (opts.method) {
    case IntegrationMethod::rk4_fixed: return run_rk4(rhs, x0, opts, stop, admissible);
    case IntegrationMethod::rk45_adaptive: return run_dopri(rhs, x0, opts, stop, admissible);
  }
  throw InvalidArgument("unknown integration method");
}

void require_success(const Trajectory& trajectory) {
  switch (trajectory.terminated_by) {
    case Termination::step_failure:
      throw StepFailure("integration step size collapsed at t = " +
                        std::to_string(trajectory.final_time()));
    case Termination::max_steps_exceeded:
      throw MaxStepsExceeded("integration step budget exhausted at t = " +
                             std::to_string(trajectory.final_time()));
    default: break;
  }
}

}  // namespace wisdomdyn
