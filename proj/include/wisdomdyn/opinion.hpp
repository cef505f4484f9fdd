#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "wisdomdyn/graph.hpp"
#include "wisdomdyn/ode.hpp"

namespace wisdomdyn {

/// Strictly positive per-agent susceptibilities z.
class SusceptibilityProfile {
 public:
  explicit SusceptibilityProfile(Vector values);

  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

  SusceptibilityProfile scaled(double factor) const;

 private:
  Vector values_;
};

/// Ground truth theta and strictly positive observation variances.
struct NoiseModel {
  NoiseModel(double theta, Vector sigma2);

  double theta;
  Vector sigma2;
};

enum class NoiseDistribution { gaussian, uniform };

std::string_view to_string(NoiseDistribution d);
NoiseDistribution parse_noise_distribution(std::string_view name);

/// x_i' = z_i * sum_j W(i, j) (x_j - x_i).
Vector abelson_rhs(const Vector& x, const SusceptibilityProfile& z, const WeightedDigraph& g);

/// w_i = (mu_i / z_i) / sum_j (mu_j / z_j): the left null vector of
/// L(diag(z) W), i.e. how much each initial opinion counts in the consensus.
Vector consensus_weights(const SusceptibilityProfile& z, const CentralityVector& mu);

double predict_consensus(const Vector& x0, const SusceptibilityProfile& z,
                         const CentralityVector& mu);

/// Variance of the consensus value when agent k starts at theta plus
/// uncorrelated noise of variance sigma2_k:
///   v(z) = (sum_j mu_j / z_j)^-2 * sum_k mu_k^2 sigma2_k / z_k^2
double consensus_variance(const SusceptibilityProfile& z, const CentralityVector& mu,
                          const Vector& sigma2);

/// (sum_k 1 / sigma2_k)^-1, the minimum of consensus_variance over all z.
double optimal_variance(const Vector& sigma2);

/// z_i = alpha * mu_i * sigma2_i; every alpha > 0 attains optimal_variance.
SusceptibilityProfile optimal_profile(const CentralityVector& mu, const Vector& sigma2,
                                      double alpha);

/// With r_i = z_i / (mu_i sigma2_i), returns (max r - min r) / mean r. Zero
/// exactly on the optimal ray.
double distance_to_optimal(const SusceptibilityProfile& z, const CentralityVector& mu,
                           const Vector& sigma2);

/// Spread threshold used to declare consensus: 1e-9 * (1 + ||x0||_inf).
double consensus_threshold(const Vector& x0);

/// Integrates the Abelson dynamics until max(x) - min(x) drops below
/// consensus_threshold(x0) or opts.t_end is reached. Throws
/// NotStronglyConnected for graphs without a unique consensus and rethrows
/// integrator failures.
Trajectory simulate_opinions(const Vector& x0, const SusceptibilityProfile& z,
                             const WeightedDigraph& g, const IntegratorOptions& opts);

struct MonteCarloResult {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double variance = 0.0;         // unbiased sample variance of the consensus value
  double mean_stderr = 0.0;      // sqrt(variance / trials)
  double variance_stderr = 0.0;  // from the sample fourth central moment
  double analytic_variance = 0.0;
};

/// Samples x0 = theta + xi with independent zero-mean noise of variance
/// sigma2 and evaluates the closed-form consensus value per trial. Trial k
/// draws from StreamRng(seed, k), so the result does not depend on
/// `threads` (0 means: use default_thread_count()).
MonteCarloResult monte_carlo_variance(const SusceptibilityProfile& z, const WeightedDigraph& g,
                                      const NoiseModel& noise, std::size_t trials,
                                      std::uint64_t seed,
                                      NoiseDistribution distribution = NoiseDistribution::gaussian,
                                      std::size_t threads = 0);

}  // namespace wisdomdyn
