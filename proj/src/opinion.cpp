#include "wisdomdyn/opinion.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "wisdomdyn/error.hpp"
#include "wisdomdyn/parallel.hpp"
#include "wisdomdyn/random.hpp"

namespace wisdomdyn {

namespace {

void require_positive(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0) || !std::isfinite(v(i))) {
      throw NonPositiveInput(std::string(what) + " entry " + std::to_string(i + 1) +
                             " must be finite and strictly positive");
    }
  }
}

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + " has length " + std::to_string(got) +
                            ", expected " + std::to_string(want));
  }
}

double spread(const Vector& x) { return x.maxCoeff() - x.minCoeff(); }

}  // namespace

SusceptibilityProfile::SusceptibilityProfile(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw InvalidArgument("susceptibility profile is empty");
  require_positive(values_, "susceptibility");
}

SusceptibilityProfile SusceptibilityProfile::scaled(double factor) const {
  return SusceptibilityProfile(values_ * factor);
}

NoiseModel::NoiseModel(double theta_, Vector sigma2_) : theta(theta_), sigma2(std::move(sigma2_)) {
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  if (sigma2.size() == 0) throw InvalidArgument("variance vector is empty");
  require_positive(sigma2, "variance");
}

std::string_view to_string(NoiseDistribution d) {
  return d == NoiseDistribution::gaussian ? "gaussian" : "uniform";
}

NoiseDistribution parse_noise_distribution(std::string_view name) {
  if (name == "gaussian") return NoiseDistribution::gaussian;
  if (name == "uniform") return NoiseDistribution::uniform;
  throw InvalidArgument("unknown noise distribution '" + std::string(name) + "'");
}

Vector abelson_rhs(const Vector& x, const SusceptibilityProfile& z, const WeightedDigraph& g) {
  require_size(static_cast<std::size_t>(x.size()), g.size(), "opinion state");
  require_size(z.size(), g.size(), "susceptibility profile");
  const Matrix& w = g.weights();
  Vector dx(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double pull = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) pull += w(i, j) * (x(j) - x(i));
    dx(i) = z.values()(i) * pull;
  }
  return dx;
}

Vector consensus_weights(const SusceptibilityProfile& z, const CentralityVector& mu) {
  require_size(z.size(), mu.size(), "susceptibility profile");
  Vector w = mu.values().cwiseQuotient(z.values());
  return w / w.sum();
}

double predict_consensus(const Vector& x0, const SusceptibilityProfile& z,
                         const CentralityVector& mu) {
  require_size(static_cast<std::size_t>(x0.size()), mu.size(), "initial opinions");
  return consensus_weights(z, mu).dot(x0);
}

double consensus_variance(const SusceptibilityProfile& z, const CentralityVector& mu,
                          const Vector& sigma2) {
  require_size(z.size(), mu.size(), "susceptibility profile");
  require_size(static_cast<std::size_t>(sigma2.size()), mu.size(), "variance vector");
  require_positive(sigma2, "variance");
  const Vector ratio = mu.values().cwiseQuotient(z.values());
  const double total = ratio.sum();
  return ratio.cwiseAbs2().cwiseProduct(sigma2).sum() / (total * total);
}

double optimal_variance(const Vector& sigma2) {
  if (sigma2.size() == 0) throw InvalidArgument("variance vector is empty");
  require_positive(sigma2, "variance");
  return 1.0 / sigma2.cwiseInverse().sum();
}

SusceptibilityProfile optimal_profile(const CentralityVector& mu, const Vector& sigma2,
                                      double alpha) {
  require_size(static_cast<std::size_t>(sigma2.size()), mu.size(), "variance vector");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw NonPositiveInput("optimal profile scale alpha must be positive");
  }
  return SusceptibilityProfile(alpha * mu.values().cwiseProduct(sigma2));
}

double distance_to_optimal(const SusceptibilityProfile& z, const CentralityVector& mu,
                           const Vector& sigma2) {
  require_size(z.size(), mu.size(), "susceptibility profile");
  require_size(static_cast<std::size_t>(sigma2.size()), mu.size(), "variance vector");
  const Vector r = z.values().cwiseQuotient(mu.values().cwiseProduct(sigma2));
  return (r.maxCoeff() - r.minCoeff()) / r.mean();
}

double consensus_threshold(const Vector& x0) {
  return 1e-9 * (1.0 + x0.cwiseAbs().maxCoeff());
}

Trajectory simulate_opinions(const Vector& x0, const SusceptibilityProfile& z,
                             const WeightedDigraph& g, const IntegratorOptions& opts) {
  require_size(static_cast<std::size_t>(x0.size()), g.size(), "initial opinions");
  require_size(z.size(), g.size(), "susceptibility profile");
  if (!is_strongly_connected(g)) {
    throw NotStronglyConnected("opinion simulation requires a strongly connected graph");
  }
  const double threshold = consensus_threshold(x0);
  Trajectory traj = integrate_until(
      [&](double, const Vector& x) { return abelson_rhs(x, z, g); }, x0, opts,
      [threshold](double, const Vector& x) { return spread(x) < threshold; });
  require_success(traj);
  return traj;
}

MonteCarloResult monte_carlo_variance(const SusceptibilityProfile& z, const WeightedDigraph& g,
                                      const NoiseModel& noise, std::size_t trials,
                                      std::uint64_t seed, NoiseDistribution distribution,
                                      std::size_t threads) {
  if (trials < 2) throw InvalidArgument("Monte Carlo needs at least two trials");
  require_size(z.size(), g.size(), "susceptibility profile");
  require_size(static_cast<std::size_t>(noise.sigma2.size()), g.size(), "variance vector");
  const CentralityVector mu = centrality(g);
  const Vector w = consensus_weights(z, mu);
  const Vector sd = noise.sigma2.cwiseSqrt();
  const Eigen::Index n = w.size();
  // Uniform noise on [-a, a] has variance a^2 / 3.
  const double uniform_half_width = std::sqrt(3.0);

  std::vector<double> values(trials);
  parallel_for(trials, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      StreamRng rng(seed, k);
      double value = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double unit = distribution == NoiseDistribution::gaussian
                                ? rng.normal()
                                : rng.uniform(-uniform_half_width, uniform_half_width);
        value += w(i) * (noise.theta + sd(i) * unit);
      }
      values[k] = value;
    }
  });

  const double count = static_cast<double>(trials);
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / count;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const double v : values) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double variance = m2 / (count - 1.0);
  const double fourth = m4 / count;
  const double var_of_var =
      std::max(0.0, (fourth - variance * variance * (count - 3.0) / (count - 1.0)) / count);

  MonteCarloResult result;
  result.trials = trials;
  result.seed = seed;
  result.mean = mean;
  result.variance = variance;
  result.mean_stderr = std::sqrt(variance / count);
  result.variance_stderr = std::sqrt(var_of_var);
  result.analytic_variance = consensus_variance(z, mu, noise.sigma2);
  return result;
}

}  // namespace wisdomdyn
