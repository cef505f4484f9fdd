#include "wisdomdyn/learning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wisdomdyn/error.hpp"

namespace wisdomdyn {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + " has length " + std::to_string(got) +
                            ", expected " + std::to_string(want));
  }
}

void require_agent(std::size_t i, const LearningProblem& p) {
  if (i >= p.size()) {
    throw InvalidArgument("agent index " + std::to_string(i) + " out of range for " +
                          std::to_string(p.size()) + " agents");
  }
}

// The raw kernels below skip validation; the integrator calls them on stage
// states that may be slightly outside the positive orthant, and a rejected
// step is the right response there rather than an exception.

double gradient_raw(Eigen::Index i, const Vector& z, const LearningProblem& p) {
  const Matrix& w = p.learning_graph().weights();
  const Vector& mu = p.mu().values();
  const Vector& s2 = p.sigma2();
  double a = 0.0;
  double b = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double wk = w(i, k);
    if (wk == 0.0) continue;
    const double r = mu(k) / z(k);
    a += wk * r * r * s2(k);
    b += wk * r;
  }
  const double self = w(i, i);
  if (self == 0.0) return 0.0;
  const double zi = z(i);
  const double da = -2.0 * self * mu(i) * mu(i) * s2(i) / (zi * zi * zi);
  const double db = -self * mu(i) / (zi * zi);
  return (b * da - 2.0 * a * db) / (b * b * b);
}

Vector z_rhs_raw(const Vector& z, const LearningProblem& p) {
  Vector dz(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) dz(i) = -gradient_raw(i, z, p);
  return dz;
}

Vector y_rhs_raw(const Vector& y, const LearningProblem& p) {
  const Matrix& w = p.learning_graph().weights();
  const Vector& mu = p.mu().values();
  const Vector& s2 = p.sigma2();
  const Eigen::Index n = y.size();
  Vector dy(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double b = 0.0;
    double pull = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double term = w(i, j) * y(j) / s2(j);
      b += term;
      pull += term * (y(j) - y(i));
    }
    const double yi2 = y(i) * y(i);
    const double gain = 2.0 * yi2 * yi2 * w(i, i) / (mu(i) * mu(i) * s2(i) * s2(i) * s2(i) * b * b * b);
    dy(i) = gain * pull;
  }
  return dy;
}

// y = mu sigma2 / z and z = mu sigma2 / y share one formula.
Vector swap_coordinates(const Vector& z, const LearningProblem& p) {
  return p.mu().values().cwiseProduct(p.sigma2()).cwiseQuotient(z);
}

}  // namespace

LearningProblem::LearningProblem(WeightedDigraph learning_graph, CentralityVector mu,
                                 Vector sigma2)
    : graph_(std::move(learning_graph)), mu_(std::move(mu)), sigma2_(std::move(sigma2)) {
  require_size(mu_.size(), graph_.size(), "centrality vector");
  require_size(static_cast<std::size_t>(sigma2_.size()), graph_.size(), "variance vector");
  for (Eigen::Index i = 0; i < sigma2_.size(); ++i) {
    if (!(sigma2_(i) > 0.0) || !std::isfinite(sigma2_(i))) {
      throw NonPositiveInput("variance entry " + std::to_string(i + 1) +
                             " must be finite and strictly positive");
    }
  }
  const Matrix& w = graph_.weights();
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (!(w.row(i).sum() > 0.0)) {
      throw IsolatedAgent("agent " + std::to_string(i + 1) + " has no learning-graph in-edges");
    }
  }
  if (!has_self_loops(graph_)) {
    throw MissingSelfLoop("every agent needs a positive self-loop in the learning graph");
  }
  if (!is_strongly_connected(graph_)) {
    throw NotStronglyConnected("the learning graph must be strongly connected");
  }
}

YState::YState(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw InvalidArgument("y state is empty");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_(i) > 0.0) || !std::isfinite(values_(i))) {
      throw NonPositiveInput("y entry " + std::to_string(i + 1) +
                             " must be finite and strictly positive");
    }
  }
}

YState to_y(const SusceptibilityProfile& z, const CentralityVector& mu, const Vector& sigma2) {
  require_size(z.size(), mu.size(), "susceptibility profile");
  require_size(static_cast<std::size_t>(sigma2.size()), mu.size(), "variance vector");
  if (!(sigma2.array() > 0.0).all()) throw NonPositiveInput("variances must be positive");
  return YState(mu.values().cwiseProduct(sigma2).cwiseQuotient(z.values()));
}

SusceptibilityProfile from_y(const YState& y, const CentralityVector& mu, const Vector& sigma2) {
  require_size(y.size(), mu.size(), "y state");
  require_size(static_cast<std::size_t>(sigma2.size()), mu.size(), "variance vector");
  if (!(sigma2.array() > 0.0).all()) throw NonPositiveInput("variances must be positive");
  return SusceptibilityProfile(mu.values().cwiseProduct(sigma2).cwiseQuotient(y.values()));
}

double local_utility(std::size_t i, const SusceptibilityProfile& z, const LearningProblem& p) {
  require_agent(i, p);
  require_size(z.size(), p.size(), "susceptibility profile");
  const Matrix& w = p.learning_graph().weights();
  const Vector& mu = p.mu().values();
  const Vector& s2 = p.sigma2();
  const auto row = static_cast<Eigen::Index>(i);
  double a = 0.0;
  double b = 0.0;
  for (Eigen::Index k = 0; k < z.values().size(); ++k) {
    const double r = mu(k) / z.values()(k);
    a += w(row, k) * r * r * s2(k);
    b += w(row, k) * r;
  }
  return a / (b * b);
}

double utility_gradient(std::size_t i, const SusceptibilityProfile& z, const LearningProblem& p) {
  require_agent(i, p);
  require_size(z.size(), p.size(), "susceptibility profile");
  return gradient_raw(static_cast<Eigen::Index>(i), z.values(), p);
}

Vector z_rhs(const SusceptibilityProfile& z, const LearningProblem& p) {
  require_size(z.size(), p.size(), "susceptibility profile");
  return z_rhs_raw(z.values(), p);
}

Matrix coupling_matrix(const YState& y, const LearningProblem& p) {
  require_size(y.size(), p.size(), "y state");
  const Matrix& w = p.learning_graph().weights();
  const Vector& mu = p.mu().values();
  const Vector& s2 = p.sigma2();
  const Vector& v = y.values();
  const Eigen::Index n = v.size();
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double b = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) b += w(i, k) * v(k) / s2(k);
    const double yi2 = v(i) * v(i);
    const double lead =
        2.0 * yi2 * yi2 * w(i, i) / (mu(i) * mu(i) * s2(i) * s2(i) * s2(i) * b * b * b);
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = lead * v(j) * w(i, j) / s2(j);
  }
  return m;
}

Vector y_rhs(const YState& y, const LearningProblem& p) {
  require_size(y.size(), p.size(), "y state");
  return y_rhs_raw(y.values(), p);
}

bool equilibrium_check(const SusceptibilityProfile& z, const LearningProblem& p, double tol) {
  return z_rhs(z, p).cwiseAbs().maxCoeff() < tol;
}

double relative_spread(const Vector& y) { return (y.maxCoeff() - y.minCoeff()) / y.mean(); }

std::string_view to_string(Coordinates c) {
  return c == Coordinates::y_space ? "y_space" : "z_space";
}

Coordinates parse_coordinates(std::string_view name) {
  if (name == "y_space" || name == "y") return Coordinates::y_space;
  if (name == "z_space" || name == "z") return Coordinates::z_space;
  throw InvalidArgument("unknown coordinates '" + std::string(name) + "'");
}

LearnResult learn(const SusceptibilityProfile& z0, const LearningProblem& p,
                  const LearnSettings& settings) {
  require_size(z0.size(), p.size(), "initial susceptibility profile");
  const bool in_y = settings.coordinates == Coordinates::y_space;
  const Vector y0 = swap_coordinates(z0.values(), p);

  LearnDiagnostics diag;
  diag.hull_lower = y0.minCoeff();
  diag.hull_upper = y0.maxCoeff();
  const double scale = diag.hull_upper;
  const double hull_slack = settings.hull_tolerance * scale;
  const double monotone_slack = settings.monotone_slack * scale;

  double prev_max = diag.hull_upper;
  double prev_min = diag.hull_lower;
  auto observe = [&](double t, const Vector& state) {
    const Vector y = in_y ? state : swap_coordinates(state, p);
    if (!(state.array() > 0.0).all() || !(y.array() > 0.0).all()) diag.strictly_positive = false;
    const double hi = y.maxCoeff();
    const double lo = y.minCoeff();
    if (hi > diag.hull_upper + hull_slack || lo < diag.hull_lower - hull_slack) {
      throw HullViolation("y left its initial hull [" + std::to_string(diag.hull_lower) + ", " +
                          std::to_string(diag.hull_upper) + "] at t = " + std::to_string(t));
    }
    const double rise = std::max(hi - prev_max, prev_min - lo);
    if (rise > 0.0) diag.worst_monotone_violation = std::max(diag.worst_monotone_violation, rise / scale);
    if (rise > monotone_slack) diag.hull_monotone = false;
    prev_max = hi;
    prev_min = lo;
    return relative_spread(y) < settings.convergence_threshold;
  };
  auto positive = [](const Vector& v) { return (v.array() > 0.0).all(); };

  Trajectory traj =
      in_y ? integrate_until([&p](double, const Vector& y) { return y_rhs_raw(y, p); }, y0,
                             settings.integrator, observe, positive)
           : integrate_until([&p](double, const Vector& z) { return z_rhs_raw(z, p); },
                             z0.values(), settings.integrator, observe, positive);

  if (traj.terminated_by == Termination::step_failure &&
      settings.integrator.method == IntegrationMethod::rk4_fixed) {
    throw HullViolation("fixed step proposed a nonpositive state at t = " +
                         std::to_string(traj.final_time()));
  }
  require_success(traj);

  Trajectory other;
  other.times = traj.times;
  other.terminated_by = traj.terminated_by;
  other.accepted_steps = traj.accepted_steps;
  other.rejected_steps = traj.rejected_steps;
  other.states.reserve(traj.states.size());
  for (const Vector& s : traj.states) other.states.push_back(swap_coordinates(s, p));

  Trajectory& ys = in_y ? traj : other;
  Trajectory& zs = in_y ? other : traj;
  diag.y_min.reserve(ys.size());
  diag.y_max.reserve(ys.size());
  for (const Vector& y : ys.states) {
    diag.y_min.push_back(y.minCoeff());
    diag.y_max.push_back(y.maxCoeff());
  }
  const Vector& y_end = ys.final_state();
  diag.final_spread = relative_spread(y_end);
  diag.zeta = y_end.mean();
  diag.converged = diag.final_spread < settings.convergence_threshold;
  diag.terminated_by = traj.terminated_by;

  SusceptibilityProfile z_limit(zs.final_state());
  diag.distance_to_optimal = distance_to_optimal(z_limit, p.mu(), p.sigma2());
  return LearnResult{std::move(zs), std::move(ys), std::move(z_limit), std::move(diag)};
}

}  // namespace wisdomdyn
