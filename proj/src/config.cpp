#include "wisdomdyn/config.hpp"

#include <fstream>
#include <string>

#include "wisdomdyn/error.hpp"
#include "wisdomdyn/experiments.hpp"
#include "wisdomdyn/random.hpp"

namespace wisdomdyn {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  return doc.at(key);
}

Vector read_vector(const json& node, const char* what) {
  if (!node.is_array() || node.empty()) {
    throw ConfigError(std::string(what) + " must be a non-empty array of numbers");
  }
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) throw ConfigError(std::string(what) + " must contain only numbers");
    v(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return v;
}

void require_positive(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0) || !std::isfinite(v(i))) {
      throw ConfigError(std::string(what) + "[" + std::to_string(i + 1) +
                        "] must be strictly positive");
    }
  }
}

void require_length(const Vector& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw ConfigError(std::string(what) + " has " + std::to_string(v.size()) +
                      " entries but the graph has " + std::to_string(n) + " nodes");
  }
}

std::size_t read_node_id(const json& node) {
  if (!node.is_number_integer() || node.get<long long>() < 1) {
    throw ConfigError("edge endpoints must be positive 1-based integers");
  }
  return static_cast<std::size_t>(node.get<long long>());
}

WeightedDigraph read_graph(const json& spec, const char* what) {
  if (!spec.is_object()) throw ConfigError(std::string(what) + " must be an object");
  const json& edges_node = require(spec, "edges");
  if (!edges_node.is_array()) throw ConfigError(std::string(what) + ".edges must be an array");
  std::vector<Edge> edges;
  std::size_t max_id = 0;
  for (const json& e : edges_node) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) {
      throw ConfigError(std::string(what) + ".edges entries must be [from, to] or [from, to, weight]");
    }
    const std::size_t from = read_node_id(e[0]);
    const std::size_t to = read_node_id(e[1]);
    double weight = 1.0;
    if (e.size() == 3) {
      if (!e[2].is_number()) throw ConfigError("edge weight must be a number");
      weight = e[2].get<double>();
      if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw ConfigError("edge weights must be finite and positive");
      }
    }
    max_id = std::max({max_id, from, to});
    edges.push_back(Edge{from - 1, to - 1, weight});
  }
  std::size_t n = max_id;
  if (spec.contains("n")) {
    if (!spec["n"].is_number_integer() || spec["n"].get<long long>() < 1) {
      throw ConfigError(std::string(what) + ".n must be a positive integer");
    }
    n = static_cast<std::size_t>(spec["n"].get<long long>());
    if (n < max_id) throw ConfigError(std::string(what) + ".n is smaller than an edge endpoint");
  }
  if (n == 0) throw ConfigError(std::string(what) + " has no nodes");
  const bool undirected = spec.value("undirected", false);
  const double self_loops = spec.value("self_loops", 0.0);
  if (self_loops < 0.0) throw ConfigError(std::string(what) + ".self_loops must be nonnegative");
  return WeightedDigraph::from_edges(n, edges, undirected, self_loops);
}

IntegratorOptions read_integrator(const json& node) {
  IntegratorOptions opts;
  opts.t_end = 1e5;
  opts.max_steps = 2'000'000;
  if (node.is_null()) return opts;
  if (!node.is_object()) throw ConfigError("integrator must be an object");
  if (node.contains("method")) opts.method = parse_integration_method(node["method"].get<std::string>());
  opts.dt = node.value("dt", opts.dt);
  opts.rtol = node.value("rtol", opts.rtol);
  opts.atol = node.value("atol", opts.atol);
  opts.t_end = node.value("t_end", opts.t_end);
  opts.max_steps = node.value("max_steps", opts.max_steps);
  opts.record_every = node.value("record_every", opts.record_every);
  try {
    opts.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return opts;
}

ProfileSpec read_profile(const json& node, std::size_t n) {
  ProfileSpec spec;
  if (node.is_null()) return spec;
  if (node.is_array()) {
    Vector z = read_vector(node, "z0");
    require_length(z, n, "z0");
    require_positive(z, "z0");
    spec.values = std::move(z);
    return spec;
  }
  if (!node.is_object()) throw ConfigError("z0 must be an array or {\"seed\", \"range\"}");
  spec.seed = node.value("seed", spec.seed);
  if (node.contains("range")) {
    const Vector range = read_vector(node["range"], "z0.range");
    if (range.size() != 2 || !(range(0) > 0.0) || !(range(1) > range(0))) {
      throw ConfigError("z0.range must be [lo, hi] with 0 < lo < hi");
    }
    spec.lo = range(0);
    spec.hi = range(1);
  }
  return spec;
}

}  // namespace

Normalization parse_normalization(std::string_view name) {
  if (name == "raw") return Normalization::raw;
  if (name == "row-stochastic" || name == "row_stochastic") return Normalization::row_stochastic;
  throw ConfigError("normalization must be 'raw' or 'row-stochastic', got '" + std::string(name) + "'");
}

std::string_view to_string(Normalization n) {
  return n == Normalization::raw ? "raw" : "row-stochastic";
}

nlohmann::json to_json(const IntegratorOptions& opts) {
  return {{"method", std::string(to_string(opts.method))},
          {"dt", opts.dt},
          {"rtol", opts.rtol},
          {"atol", opts.atol},
          {"t_end", opts.t_end},
          {"max_steps", opts.max_steps},
          {"record_every", opts.record_every}};
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  try {
    WeightedDigraph social = read_graph(require(doc, "social_graph"), "social_graph");
    const std::size_t n = social.size();
    WeightedDigraph learning = doc.contains("learning_graph")
                                   ? read_graph(doc["learning_graph"], "learning_graph")
                                   : social.with_self_loops(1.0);
    if (learning.size() != n) {
      throw ConfigError("learning_graph and social_graph must have the same node count");
    }

    ExperimentConfig cfg(doc, std::move(social), std::move(learning),
                         read_vector(require(doc, "sigma2"), "sigma2"));
    require_length(cfg.sigma2, n, "sigma2");
    require_positive(cfg.sigma2, "sigma2");
    cfg.theta = doc.value("theta", 0.0);
    if (!std::isfinite(cfg.theta)) throw ConfigError("theta must be finite");
    cfg.normalization = parse_normalization(doc.value("normalization", std::string("raw")));
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.z0 = read_profile(doc.contains("z0") ? doc["z0"] : json(), n);
    if (doc.contains("x0")) {
      Vector x0 = read_vector(doc["x0"], "x0");
      require_length(x0, n, "x0");
      cfg.x0 = std::move(x0);
    }
    cfg.integrator = read_integrator(doc.contains("integrator") ? doc["integrator"] : json());
    if (doc.contains("coordinates")) {
      cfg.coordinates = parse_coordinates(doc["coordinates"].get<std::string>());
    }
    if (doc.contains("montecarlo")) {
      const json& mc = doc["montecarlo"];
      cfg.montecarlo.trials = mc.value("trials", cfg.montecarlo.trials);
      cfg.montecarlo.seed = mc.value("seed", cfg.montecarlo.seed);
      cfg.montecarlo.distribution =
          parse_noise_distribution(mc.value("distribution", std::string("gaussian")));
      if (cfg.montecarlo.trials < 2) throw ConfigError("montecarlo.trials must be at least 2");
    }
    cfg.output_dir = doc.value("output_dir", cfg.output_dir.string());
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

WeightedDigraph ExperimentConfig::opinion_graph() const {
  return normalized(social_graph, normalization);
}

CentralityVector ExperimentConfig::mu() const { return centrality(opinion_graph()); }

LearningProblem ExperimentConfig::learning_problem() const {
  return LearningProblem(learning_graph, mu(), sigma2);
}

SusceptibilityProfile ExperimentConfig::initial_profile() const {
  if (z0.values) return SusceptibilityProfile(*z0.values);
  return sample_initial_profile(static_cast<std::size_t>(sigma2.size()), z0.seed, z0.lo, z0.hi);
}

Vector ExperimentConfig::initial_opinions() const {
  if (x0) return *x0;
  StreamRng rng(seed, 0);
  Vector x(sigma2.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = theta + std::sqrt(sigma2(i)) * rng.normal();
  return x;
}

void ExperimentConfig::override_seed(std::uint64_t new_seed) {
  seed = new_seed;
  z0.seed = new_seed;
  montecarlo.seed = new_seed;
}

}  // namespace wisdomdyn
