#include <gtest/gtest.h>

#include <cmath>

#include "wisdomdyn/error.hpp"
#include "wisdomdyn/experiments.hpp"
#include "wisdomdyn/opinion.hpp"
#include "wisdomdyn/random.hpp"
#include "wisdomdyn/verify.hpp"

using namespace wisdomdyn;

namespace {

WeightedDigraph pair_graph() {
  return WeightedDigraph::from_edges(2, {{0, 1, 1.0}}, true);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const Vector kSigma2 = vec({1, 1.1, 1, 1.2, 1.1, 1});

CentralityVector example_mu() { return build_paper_example().mu; }

IntegratorOptions tight() {
  IntegratorOptions o;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  o.t_end = 1e4;
  return o;
}

}  // namespace

TEST(Opinion, ProfileValidation) {
  EXPECT_THROW(SusceptibilityProfile(vec({1.0, 0.0})), NonPositiveInput);
  EXPECT_THROW(SusceptibilityProfile(vec({1.0, -2.0})), NonPositiveInput);
  EXPECT_THROW(NoiseModel(0.0, vec({1.0, -1.0})), NonPositiveInput);
}

TEST(Opinion, AbelsonRhsExamples) {
  const SusceptibilityProfile z(vec({1, 1}));
  EXPECT_EQ(abelson_rhs(vec({0, 2}), z, pair_graph()), vec({2, -2}));
  EXPECT_TRUE(abelson_rhs(vec({3, 3}), z, pair_graph()).isZero(0.0));
  EXPECT_THROW(abelson_rhs(vec({1, 2, 3}), z, pair_graph()), DimensionMismatch);
}

TEST(Opinion, AbelsonRhsMatchesLaplacianForm) {
  StreamRng rng(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const WeightedDigraph g = random_strongly_connected_graph(rng, n, 0.4, trial % 2 == 0);
    const SusceptibilityProfile z = random_profile(rng, n, 0.1, 10.0);
    Vector x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    const Vector expected = -(z.values().asDiagonal() * laplacian(g) * x);
    EXPECT_LT((abelson_rhs(x, z, g) - expected).lpNorm<Eigen::Infinity>(), 1e-13);
  }
}

TEST(Opinion, ConsensusWeightExamples) {
  const CentralityVector mu = example_mu();
  EXPECT_LT((consensus_weights(SusceptibilityProfile(Vector::Constant(6, 3.0)), mu) - mu.values())
                .lpNorm<Eigen::Infinity>(),
            1e-15);
  const Vector w = consensus_weights(optimal_profile(mu, kSigma2, 2.5), mu);
  const Vector inv = kSigma2.cwiseInverse() / kSigma2.cwiseInverse().sum();
  EXPECT_LT((w - inv).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_NEAR(w.sum(), 1.0, 1e-14);
}

TEST(Opinion, PredictConsensusExamples) {
  const CentralityVector mu = example_mu();
  const SusceptibilityProfile z(vec({0.3, 1, 2, 0.7, 5, 1.1}));
  EXPECT_NEAR(predict_consensus(Vector::Constant(6, 4.25), z, mu), 4.25, 1e-14);
  const CentralityVector uniform(Vector::Constant(4, 0.25));
  EXPECT_NEAR(predict_consensus(vec({1, 2, 3, 10}), SusceptibilityProfile(Vector::Ones(4)), uniform),
              4.0, 1e-14);
}

TEST(Opinion, ConsensusVarianceExamples) {
  EXPECT_DOUBLE_EQ(consensus_variance(SusceptibilityProfile(vec({3.7})), CentralityVector(vec({1.0})),
                                      vec({2.5})),
                   2.5);
  const CentralityVector mu = example_mu();
  const double at_unit = consensus_variance(SusceptibilityProfile(Vector::Ones(6)), mu, kSigma2);
  EXPECT_NEAR(at_unit, mu.values().cwiseAbs2().dot(kSigma2), 1e-15);
}

TEST(Opinion, OptimalVarianceExamples) {
  EXPECT_NEAR(optimal_variance(Vector::Constant(5, 2.0)), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(optimal_variance(vec({3.0})), 3.0);
  const double expected = 1.0 / (3.0 + 2.0 / 1.1 + 1.0 / 1.2);
  EXPECT_NEAR(optimal_variance(kSigma2), expected, 1e-14);
  EXPECT_NEAR(optimal_variance(kSigma2), 0.176944, 1e-6);
}

TEST(Opinion, OptimalProfileExamples) {
  const CentralityVector mu = example_mu();
  const Vector expected = vec({0.125, 0.20625, 0.125, 0.3, 0.20625, 0.125});
  EXPECT_LT((optimal_profile(mu, kSigma2, 1.0).values() - expected).lpNorm<Eigen::Infinity>(), 1e-15);
  for (double alpha : {0.5, 1.0, 7.0}) {
    EXPECT_NEAR(consensus_variance(optimal_profile(mu, kSigma2, alpha), mu, kSigma2),
                optimal_variance(kSigma2), 1e-12);
  }
  const CentralityVector uniform(Vector::Constant(3, 1.0 / 3));
  const Vector z = optimal_profile(uniform, Vector::Constant(3, 2.0), 1.0).values();
  EXPECT_EQ(z.maxCoeff(), z.minCoeff());
  EXPECT_THROW(optimal_profile(mu, kSigma2, 0.0), NonPositiveInput);
}

TEST(Opinion, DistanceToOptimal) {
  const CentralityVector mu = example_mu();
  EXPECT_NEAR(distance_to_optimal(optimal_profile(mu, kSigma2, 3.0), mu, kSigma2), 0.0, 1e-14);
  Vector z = optimal_profile(mu, kSigma2, 1.0).values();
  z(2) *= 2.0;
  const SusceptibilityProfile off(z);
  EXPECT_GT(distance_to_optimal(off, mu, kSigma2), 0.5);
  EXPECT_NEAR(distance_to_optimal(off.scaled(13.0), mu, kSigma2), distance_to_optimal(off, mu, kSigma2),
              1e-14);
}

TEST(Opinion, VarianceIsScaleInvariant) {
  StreamRng rng(12, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const CentralityVector mu = centrality(random_strongly_connected_graph(rng, n, 0.3, false));
    const Vector s2 = random_variances(rng, n);
    const SusceptibilityProfile z = random_profile(rng, n, 0.05, 5.0);
    const double c = std::exp(rng.uniform(-4.0, 4.0));
    const double v = consensus_variance(z, mu, s2);
    EXPECT_NEAR(consensus_variance(z.scaled(c), mu, s2) / v, 1.0, 1e-12);
  }
}

TEST(Opinion, VarianceMatchesBruteForceQuadraticForm) {
  // Var(w^T xi) = sum_i w_i^2 sigma_i^2 with w from the stationary weights.
  StreamRng rng(13, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const CentralityVector mu = centrality(random_strongly_connected_graph(rng, n, 0.3, false));
    const Vector s2 = random_variances(rng, n);
    const SusceptibilityProfile z = random_profile(rng, n, 0.05, 5.0);
    const Vector w = consensus_weights(z, mu);
    EXPECT_NEAR(consensus_variance(z, mu, s2) / w.cwiseAbs2().dot(s2), 1.0, 1e-13);
  }
}

TEST(Opinion, SimulateConstantAndPair) {
  const SusceptibilityProfile z(Vector::Ones(2));
  const Trajectory flat = simulate_opinions(vec({0.7, 0.7}), z, pair_graph(), tight());
  for (const Vector& s : flat.states) EXPECT_EQ(s, vec({0.7, 0.7}));

  const Trajectory t = simulate_opinions(vec({0, 2}), z, pair_graph(), tight());
  EXPECT_EQ(t.terminated_by, Termination::predicate_satisfied);
  EXPECT_NEAR(t.final_state()(0), 1.0, 1e-8);
  EXPECT_NEAR(t.final_state()(1), 1.0, 1e-8);
}

TEST(Opinion, SimulateMatchesPredictionOnExample) {
  const PaperExample ex = build_paper_example();
  const WeightedDigraph g = normalized(ex.g, ex.normalization);
  StreamRng rng(14, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const SusceptibilityProfile z = random_profile(rng, 6, 0.1, 10.0);
    Vector x0(6);
    for (Eigen::Index i = 0; i < 6; ++i) x0(i) = 1.0 + std::sqrt(ex.sigma2(i)) * rng.normal();
    const Trajectory t = simulate_opinions(x0, z, g, tight());
    EXPECT_LT((t.final_state().array() - predict_consensus(x0, z, ex.mu)).abs().maxCoeff(), 1e-8);
  }
}

TEST(Opinion, SimulatedSpreadContracts) {
  StreamRng rng(15, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const WeightedDigraph g = random_strongly_connected_graph(rng, n, 0.3, false);
    const SusceptibilityProfile z = random_profile(rng, n, 0.1, 10.0);
    Vector x0(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = rng.normal();
    const Trajectory t = simulate_opinions(x0, z, g, tight());
    for (std::size_t k = 1; k < t.size(); ++k) {
      EXPECT_LE(t.states[k].maxCoeff(), t.states[k - 1].maxCoeff() + 1e-12);
      EXPECT_GE(t.states[k].minCoeff(), t.states[k - 1].minCoeff() - 1e-12);
    }
  }
}

TEST(Opinion, SimulateRejectsDisconnectedGraph) {
  const WeightedDigraph g = WeightedDigraph::from_edges(2, {{0, 1, 1.0}});
  EXPECT_THROW(simulate_opinions(vec({0, 1}), SusceptibilityProfile(Vector::Ones(2)), g, tight()),
               NotStronglyConnected);
}

TEST(Opinion, MonteCarloDeterministicAndThreadIndependent) {
  const PaperExample ex = build_paper_example();
  const WeightedDigraph g = normalized(ex.g, ex.normalization);
  const SusceptibilityProfile z(vec({0.3, 1, 2, 0.7, 5, 1.1}));
  const NoiseModel noise(2.0, ex.sigma2);
  const MonteCarloResult a = monte_carlo_variance(z, g, noise, 50'000, 99, NoiseDistribution::gaussian, 1);
  const MonteCarloResult b = monte_carlo_variance(z, g, noise, 50'000, 99, NoiseDistribution::gaussian, 1);
  const MonteCarloResult c = monte_carlo_variance(z, g, noise, 50'000, 99, NoiseDistribution::gaussian, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.variance_stderr, b.variance_stderr);
  EXPECT_EQ(a.mean, c.mean);
  EXPECT_EQ(a.variance, c.variance);
  const MonteCarloResult d = monte_carlo_variance(z, g, noise, 50'000, 100, NoiseDistribution::gaussian, 1);
  EXPECT_NE(a.mean, d.mean);
}

TEST(Opinion, MonteCarloWithinStandardErrors) {
  const PaperExample ex = build_paper_example();
  const WeightedDigraph g = normalized(ex.g, ex.normalization);
  const NoiseModel noise(-1.5, ex.sigma2);
  for (auto dist : {NoiseDistribution::gaussian, NoiseDistribution::uniform}) {
    const SusceptibilityProfile z(vec({0.3, 1, 2, 0.7, 5, 1.1}));
    const MonteCarloResult r = monte_carlo_variance(z, g, noise, 200'000, 7, dist);
    EXPECT_NEAR(r.analytic_variance, consensus_variance(z, ex.mu, ex.sigma2), 1e-15);
    EXPECT_LE(std::abs(r.variance - r.analytic_variance), 4.0 * r.variance_stderr);
    EXPECT_LE(std::abs(r.mean - noise.theta), 4.0 * r.mean_stderr);
    EXPECT_NEAR(r.mean_stderr, std::sqrt(r.variance / 200'000.0), 1e-15);
  }
}

TEST(Opinion, MonteCarloDegenerateNoise) {
  const PaperExample ex = build_paper_example();
  const WeightedDigraph g = normalized(ex.g, ex.normalization);
  const NoiseModel noise(0.5, Vector::Constant(6, 1e-12));
  const MonteCarloResult r =
      monte_carlo_variance(SusceptibilityProfile(Vector::Ones(6)), g, noise, 10'000, 1);
  EXPECT_LT(r.variance, 1e-11);
  EXPECT_NEAR(r.mean, 0.5, 1e-6);
  EXPECT_THROW(monte_carlo_variance(SusceptibilityProfile(Vector::Ones(6)), g, noise, 1, 1),
               InvalidArgument);
}
