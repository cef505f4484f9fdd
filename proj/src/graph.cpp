#include "wisdomdyn/graph.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "wisdomdyn/error.hpp"

namespace wisdomdyn {

namespace {

constexpr double kCentralitySumTol = 1e-12;

// Marks every node reachable from node 0 following edges forward
// (j -> i when W(i, j) > 0) or, with `reverse`, against their direction.
std::vector<bool> reachable_from_first(const Matrix& w, bool reverse) {
  const Eigen::Index n = w.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<Eigen::Index> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const Eigen::Index u = queue.front();
    queue.pop_front();
    for (Eigen::Index v = 0; v < n; ++v) {
      const double link = reverse ? w(u, v) : w(v, u);
      if (link > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

WeightedDigraph::WeightedDigraph(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.rows() != weights_.cols()) {
    throw InvalidArgument("weight matrix must be square and non-empty, got " +
                          std::to_string(weights_.rows()) + "x" +
                          std::to_string(weights_.cols()));
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidArgument("weight (" + std::to_string(i + 1) + ", " +
                              std::to_string(j + 1) +
                              ") must be finite and nonnegative");
      }
    }
  }
}

WeightedDigraph WeightedDigraph::from_edges(std::size_t n, const std::vector<Edge>& edges,
                                            bool undirected, double self_loop_weight) {
  if (n == 0) throw InvalidArgument("graph needs at least one node");
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Edge& e : edges) {
    if (e.from >= n || e.to >= n) {
      throw InvalidArgument("edge (" + std::to_string(e.from + 1) + ", " +
                            std::to_string(e.to + 1) + ") references a node outside 1.." +
                            std::to_string(n));
    }
    const auto from = static_cast<Eigen::Index>(e.from);
    const auto to = static_cast<Eigen::Index>(e.to);
    w(to, from) = e.weight;
    if (undirected) w(from, to) = e.weight;
  }
  if (self_loop_weight > 0.0) w.diagonal().setConstant(self_loop_weight);
  return WeightedDigraph(std::move(w));
}

WeightedDigraph WeightedDigraph::with_self_loops(double weight) const {
  Matrix w = weights_;
  w.diagonal().setConstant(weight);
  return WeightedDigraph(std::move(w));
}

WeightedDigraph WeightedDigraph::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  return WeightedDigraph(weights_ * factor);
}

CentralityVector::CentralityVector(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw InvalidArgument("centrality vector is empty");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_(i) > 0.0) || !std::isfinite(values_(i))) {
      throw NonPositiveInput("centrality entry " + std::to_string(i + 1) +
                             " is not strictly positive");
    }
  }
  if (std::abs(values_.sum() - 1.0) > kCentralitySumTol) {
    throw InvalidArgument("centrality entries must sum to one");
  }
}

bool is_strongly_connected(const WeightedDigraph& g) {
  const Matrix& w = g.weights();
  for (const bool hit : reachable_from_first(w, false)) {
    if (!hit) return false;
  }
  for (const bool hit : reachable_from_first(w, true)) {
    if (!hit) return false;
  }
  return true;
}

bool has_self_loops(const WeightedDigraph& g) {
  return (g.weights().diagonal().array() > 0.0).all();
}

Matrix laplacian(const WeightedDigraph& g) {
  const Matrix& w = g.weights();
  const Eigen::Index n = w.rows();
  Matrix l = -w;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row += w(i, j);
    }
    l(i, i) = row;
  }
  return l;
}

CentralityVector centrality(const WeightedDigraph& g) {
  if (!is_strongly_connected(g)) {
    throw NotStronglyConnected(
        "centrality requires a strongly connected graph; the left null vector of "
        "the Laplacian is not unique or not positive");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  // [L^T; 1^T] mu = [0; 1], solved in the least-squares sense.
  Matrix system(n + 1, n);
  system.topRows(n) = laplacian(g).transpose();
  system.row(n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  Vector mu = system.colPivHouseholderQr().solve(rhs);
  // Rounding can leave the sum a few ulps off one.
  mu /= mu.sum();
  return CentralityVector(std::move(mu));
}

WeightedDigraph row_normalize(const WeightedDigraph& g) {
  Matrix w = g.weights();
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double sum = w.row(i).sum();
    if (!(sum > 0.0)) {
      throw ZeroRow("agent " + std::to_string(i + 1) + " has no in-edges");
    }
    w.row(i) /= sum;
  }
  return WeightedDigraph(std::move(w));
}

WeightedDigraph normalized(const WeightedDigraph& g, Normalization mode) {
  return mode == Normalization::raw ? g : row_normalize(g);
}

double centrality_residual(const WeightedDigraph& g, const CentralityVector& mu) {
  return (laplacian(g).transpose() * mu.values()).cwiseAbs().maxCoeff();
}

}  // namespace wisdomdyn
