#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace wisdomdyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One directed influence link with 0-based node ids: `from` influences `to`,
/// which stores the weight at W(to, from).
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 1.0;
};

/// Dense weighted digraph. Row i of the weight matrix lists the agents that
/// influence agent i, so W(i, j) > 0 means j -> i is an edge.
///
/// Immutable after construction; the constructor rejects non-square,
/// negative or non-finite weight matrices.
class WeightedDigraph {
 public:
  explicit WeightedDigraph(Matrix weights);

  /// Builds an n-node graph from an edge list. With `undirected` each edge is
  /// inserted in both directions; `self_loop_weight` > 0 adds W(i, i) for all
  /// i. Repeated edges overwrite rather than accumulate.
  static WeightedDigraph from_edges(std::size_t n, const std::vector<Edge>& edges,
                                    bool undirected = false,
                                    double self_loop_weight = 0.0);

  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  double weight(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool has_edge(std::size_t i, std::size_t j) const { return weight(i, j) > 0.0; }

  /// Copy with every diagonal entry replaced by `weight`.
  WeightedDigraph with_self_loops(double weight) const;
  WeightedDigraph scaled(double factor) const;

 private:
  Matrix weights_;
};

/// Positive left null vector of the Laplacian, normalized to sum to one.
class CentralityVector {
 public:
  /// Checks positivity and unit sum (tolerance 1e-12).
  explicit CentralityVector(Vector values);

  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

 private:
  Vector values_;
};

enum class Normalization { raw, row_stochastic };

bool is_strongly_connected(const WeightedDigraph& g);
bool has_self_loops(const WeightedDigraph& g);

/// L = diag(W 1) - W. The diagonal is the off-diagonal row sum so that
/// L 1 == 0 holds bit-exactly.
Matrix laplacian(const WeightedDigraph& g);

/// Throws NotStronglyConnected when the left null vector is not unique.
CentralityVector centrality(const WeightedDigraph& g);

/// Throws ZeroRow when some agent has no in-edges.
WeightedDigraph row_normalize(const WeightedDigraph& g);

/// Applies `mode` to g: identity for raw, row_normalize otherwise.
WeightedDigraph normalized(const WeightedDigraph& g, Normalization mode);

/// ||L^T mu||_inf.
double centrality_residual(const WeightedDigraph& g, const CentralityVector& mu);

}  // namespace wisdomdyn
