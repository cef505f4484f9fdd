#include "wisdomdyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wisdomdyn/error.hpp"

namespace wisdomdyn {

namespace {

constexpr double kGradientRelTol = 1e-6;
constexpr double kBoundSlack = 1e-12;
constexpr double kNearEquality = 1e-10;
constexpr double kOptimalDistance = 1e-10;
constexpr double kEquilibriumTol = 1e-10;
constexpr double kEquilibriumDistance = 1e-8;
constexpr double kStandardErrors = 4.0;
constexpr double kOdeAgreement = 1e-8;

// Stream ids keep the checks' random draws independent of each other.
enum Stream : std::uint64_t {
  kGradientStream = 1,
  kBoundStream,
  kEquilibriumStream,
  kLearnStream,
  kMonteCarloStream,
  kOdeStream,
};

CheckResult make_check(std::string name, bool passed, double measured, double threshold,
                       std::string detail) {
  return CheckResult{std::move(name), passed, measured, threshold, std::move(detail)};
}

// Draws one z per instance: on the optimal ray, slightly off it, or anywhere.
SusceptibilityProfile instance_profile(StreamRng& rng, const CentralityVector& mu,
                                       const Vector& sigma2) {
  const std::size_t n = mu.size();
  const double pick = rng.uniform();
  const double alpha = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
  if (pick < 0.3) return optimal_profile(mu, sigma2, alpha);
  if (pick < 0.45) {
    Vector z = optimal_profile(mu, sigma2, alpha).values();
    const auto k = static_cast<Eigen::Index>(rng.next_u64() % n);
    z(k) *= 1.0 + (rng.uniform() < 0.5 ? -1.0 : 1.0) * 0.01;
    return SusceptibilityProfile(std::move(z));
  }
  return random_profile(rng, n, 0.05, 5.0);
}

std::size_t instance_size(StreamRng& rng) { return 2 + rng.next_u64() % 7; }

CheckResult check_centrality(const VerifyTarget& t) {
  const CentralityVector mu = centrality(t.social_graph);
  const double residual = centrality_residual(t.social_graph, mu);
  std::ostringstream detail;
  detail << "||L^T mu||_inf = " << residual << ", min mu = " << mu.values().minCoeff();
  return make_check("centrality_residual", residual <= 1e-10, residual, 1e-10, detail.str());
}

CheckResult check_gradient(const VerifyTarget& t, const VerifySettings& s) {
  StreamRng rng(s.seed, kGradientStream);
  const LearningProblem& p = t.problem;
  double worst = 0.0;
  for (std::size_t k = 0; k < s.gradient_samples; ++k) {
    const SusceptibilityProfile z = random_profile(rng, p.size(), 0.05, 5.0);
    const std::size_t i = rng.next_u64() % p.size();
    const double analytic = utility_gradient(i, z, p);
    const double numeric = finite_difference_gradient(i, z, p);
    // Floor the denominator at the gradient's natural scale u_i / z_i times
    // 1e-3; below it the difference quotient is dominated by rounding.
    const double floor = 1e-3 * local_utility(i, z, p) / z[i];
    const double err = std::abs(analytic - numeric) /
                       std::max({std::abs(analytic), std::abs(numeric), floor});
    worst = std::max(worst, err);
  }
  std::ostringstream detail;
  detail << s.gradient_samples << " samples, worst relative error " << worst;
  return make_check("gradient_finite_difference", worst <= kGradientRelTol, worst,
                    kGradientRelTol, detail.str());
}

CheckResult check_variance_bound(const VerifySettings& s) {
  StreamRng rng(s.seed, kBoundStream);
  std::size_t violations = 0;
  std::size_t mismatches = 0;
  std::size_t optimal = 0;
  double worst_gap = 0.0;
  for (std::size_t k = 0; k < s.random_instances; ++k) {
    const std::size_t n = instance_size(rng);
    const WeightedDigraph g = random_strongly_connected_graph(rng, n, 0.3, false);
    const CentralityVector mu = centrality(g);
    const Vector sigma2 = random_variances(rng, n);
    const SusceptibilityProfile z = instance_profile(rng, mu, sigma2);
    const double v = consensus_variance(z, mu, sigma2);
    const double best = optimal_variance(sigma2);
    const double dist = distance_to_optimal(z, mu, sigma2);
    if (v < best - kBoundSlack) {
      ++violations;
      worst_gap = std::max(worst_gap, best - v);
    }
    const bool near_equal = std::abs(v - best) <= kNearEquality;
    const bool on_ray = dist < kOptimalDistance;
    optimal += on_ray ? 1 : 0;
    if (near_equal != on_ray) ++mismatches;
  }
  std::ostringstream detail;
  detail << s.random_instances << " instances (" << optimal << " on the optimal ray), "
         << violations << " bound violations, " << mismatches << " equality mismatches";
  return make_check("variance_lower_bound", violations == 0 && mismatches == 0,
                    static_cast<double>(violations + mismatches), 0.0, detail.str());
}

CheckResult check_equilibria(const VerifySettings& s) {
  StreamRng rng(s.seed, kEquilibriumStream);
  std::size_t mismatches = 0;
  std::size_t equilibria = 0;
  for (std::size_t k = 0; k < s.random_instances; ++k) {
    const std::size_t n = instance_size(rng);
    const WeightedDigraph social = random_strongly_connected_graph(rng, n, 0.3, false);
    const WeightedDigraph learning = random_strongly_connected_graph(rng, n, 0.3, true);
    const Vector sigma2 = random_variances(rng, n);
    const LearningProblem p(learning, centrality(social), sigma2);
    const SusceptibilityProfile z = instance_profile(rng, p.mu(), sigma2);
    const bool at_rest = equilibrium_check(z, p, kEquilibriumTol);
    const bool on_ray = distance_to_optimal(z, p.mu(), sigma2) < kEquilibriumDistance;
    equilibria += at_rest ? 1 : 0;
    if (at_rest != on_ray) ++mismatches;
  }
  std::ostringstream detail;
  detail << s.random_instances << " instances (" << equilibria << " equilibria), " << mismatches
         << " mismatches between ||z'|| < 1e-10 and distance < 1e-8";
  return make_check("equilibria_match_optimal_ray", mismatches == 0,
                    static_cast<double>(mismatches), 0.0, detail.str());
}

std::vector<CheckResult> check_learning(const VerifyTarget& t, const VerifySettings& s) {
  StreamRng rng(s.seed, kLearnStream);
  std::size_t not_converged = 0;
  std::size_t not_monotone = 0;
  std::size_t outside_hull = 0;
  std::size_t not_positive = 0;
  double worst_distance = 0.0;
  for (std::size_t k = 0; k <= s.learn_runs; ++k) {
    const SusceptibilityProfile z0 =
        k == 0 ? t.z0 : random_profile(rng, t.problem.size(), 0.5, 2.0);
    const LearnResult r = learn(z0, t.problem);
    const LearnDiagnostics& d = r.diagnostics;
    not_converged += d.converged ? 0 : 1;
    not_monotone += d.hull_monotone ? 0 : 1;
    not_positive += d.strictly_positive ? 0 : 1;
    outside_hull += (d.zeta >= d.hull_lower && d.zeta <= d.hull_upper) ? 0 : 1;
    worst_distance = std::max(worst_distance, d.distance_to_optimal);
  }
  const std::size_t runs = s.learn_runs + 1;
  auto summary = [runs](std::size_t bad) {
    return std::to_string(runs - bad) + "/" + std::to_string(runs) + " runs";
  };
  return {
      make_check("learning_converges", not_converged == 0, worst_distance, 1e-6,
                 summary(not_converged) + " reached relative y-spread < 1e-8"),
      make_check("hull_monotone", not_monotone == 0, static_cast<double>(not_monotone), 0.0,
                 summary(not_monotone) + " kept max y non-increasing and min y non-decreasing"),
      make_check("strictly_positive", not_positive == 0, static_cast<double>(not_positive), 0.0,
                 summary(not_positive) + " kept z > 0 and y > 0"),
      make_check("limit_within_initial_hull", outside_hull == 0,
                 static_cast<double>(outside_hull), 0.0,
                 summary(outside_hull) + " ended with zeta in [min y(0), max y(0)]"),
  };
}

std::vector<CheckResult> check_monte_carlo(const VerifyTarget& t, const VerifySettings& s) {
  const NoiseModel noise(t.theta, t.problem.sigma2());
  const MonteCarloResult mc = monte_carlo_variance(
      t.z0, t.social_graph, noise, s.monte_carlo_trials,
      mix64(s.seed ^ kMonteCarloStream), NoiseDistribution::gaussian, s.threads);
  const double var_z = std::abs(mc.variance - mc.analytic_variance) / mc.variance_stderr;
  const double mean_z = std::abs(mc.mean - t.theta) / mc.mean_stderr;
  std::ostringstream var_detail;
  var_detail << "sample variance " << mc.variance << " vs closed form " << mc.analytic_variance
             << " (" << var_z << " standard errors, " << mc.trials << " trials)";
  std::ostringstream mean_detail;
  mean_detail << "sample mean " << mc.mean << " vs theta " << t.theta << " (" << mean_z
              << " standard errors)";
  return {
      make_check("monte_carlo_variance", var_z <= kStandardErrors, var_z, kStandardErrors,
                 var_detail.str()),
      make_check("monte_carlo_mean", mean_z <= kStandardErrors, mean_z, kStandardErrors,
                 mean_detail.str()),
  };
}

CheckResult check_opinion_ode(const VerifyTarget& t, const VerifySettings& s) {
  StreamRng rng(s.seed, kOdeStream);
  const CentralityVector mu = centrality(t.social_graph);
  // The consensus threshold (1e-9 relative) sits below the noise floor of
  // rtol = 1e-8 once steps become stability limited.
  IntegratorOptions opts;
  opts.rtol = 1e-10;
  opts.atol = 1e-12;
  opts.t_end = 1e4;
  double worst = 0.0;
  for (std::size_t k = 0; k < s.ode_instances; ++k) {
    const SusceptibilityProfile z =
        k == 0 ? t.z0 : random_profile(rng, t.social_graph.size(), 0.1, 10.0);
    Vector x0(static_cast<Eigen::Index>(t.social_graph.size()));
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = t.theta + rng.normal();
    const Trajectory traj = simulate_opinions(x0, z, t.social_graph, opts);
    const double predicted = predict_consensus(x0, z, mu);
    worst = std::max(worst, (traj.final_state().array() - predicted).abs().maxCoeff());
  }
  std::ostringstream detail;
  detail << s.ode_instances << " simulations, worst |x(T) - w^T x0| = " << worst;
  return make_check("opinion_consensus_matches_prediction", worst <= kOdeAgreement, worst,
                    kOdeAgreement, detail.str());
}

}  // namespace

WeightedDigraph random_strongly_connected_graph(StreamRng& rng, std::size_t n, double density,
                                                bool self_loops) {
  if (n == 0) throw InvalidArgument("graph needs at least one node");
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.next_u64() % k]);
  for (std::size_t k = 0; n > 1 && k < n; ++k) {
    w(order[(k + 1) % n], order[k]) = rng.uniform(0.2, 2.0);
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (i != j && w(i, j) == 0.0 && rng.uniform() < density) w(i, j) = rng.uniform(0.2, 2.0);
    }
    if (self_loops) w(i, i) = rng.uniform(0.2, 2.0);
  }
  return WeightedDigraph(std::move(w));
}

Vector random_variances(StreamRng& rng, std::size_t n) {
  Vector s(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
  return s;
}

SusceptibilityProfile random_profile(StreamRng& rng, std::size_t n, double lo, double hi) {
  Vector z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  return SusceptibilityProfile(std::move(z));
}

double finite_difference_gradient(std::size_t i, const SusceptibilityProfile& z,
                                  const LearningProblem& p) {
  const auto k = static_cast<Eigen::Index>(i);
  const double h = 1e-6 * z[i];
  Vector up = z.values();
  Vector down = z.values();
  up(k) += h;
  down(k) -= h;
  return (local_utility(i, SusceptibilityProfile(up), p) -
          local_utility(i, SusceptibilityProfile(down), p)) /
         (up(k) - down(k));
}

std::vector<CheckResult> run_invariant_suite(const VerifyTarget& target,
                                             const VerifySettings& settings) {
  std::vector<CheckResult> checks;
  checks.push_back(check_centrality(target));
  checks.push_back(check_gradient(target, settings));
  checks.push_back(check_variance_bound(settings));
  checks.push_back(check_equilibria(settings));
  for (CheckResult& c : check_learning(target, settings)) checks.push_back(std::move(c));
  for (CheckResult& c : check_monte_carlo(target, settings)) checks.push_back(std::move(c));
  checks.push_back(check_opinion_ode(target, settings));
  return checks;
}

}  // namespace wisdomdyn
