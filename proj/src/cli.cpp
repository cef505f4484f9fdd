#include "wisdomdyn/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wisdomdyn/config.hpp"
#include "wisdomdyn/error.hpp"
#include "wisdomdyn/experiments.hpp"
#include "wisdomdyn/io.hpp"
#include "wisdomdyn/verify.hpp"

namespace wisdomdyn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Invocation {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

json metadata(const Invocation& inv, const json& config, std::uint64_t seed) {
  return {{"tool", "wisdomdyn"},
          {"version", kToolVersion},
          {"command", inv.command},
          {"seed", seed},
          {"config", config}};
}

void write_json(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

fs::path output_dir(const Invocation& inv, const ExperimentConfig* cfg) {
  if (inv.out_dir) return *inv.out_dir;
  return cfg ? cfg->output_dir : fs::path("wisdomdyn_out");
}

int cmd_centrality(const Invocation& inv, const ExperimentConfig& cfg, std::ostream& out) {
  const WeightedDigraph g = cfg.opinion_graph();
  const CentralityVector mu = centrality(g);
  const fs::path dir = output_dir(inv, &cfg);
  std::ostringstream csv;
  csv << "node,mu\n";
  for (std::size_t i = 0; i < mu.size(); ++i) csv << (i + 1) << ',' << format_double(mu[i]) << '\n';
  write_text_file(dir / "centrality.csv", csv.str());

  json meta = metadata(inv, cfg.source, cfg.seed);
  meta["normalization"] = std::string(to_string(cfg.normalization));
  meta["mu"] = to_json(mu.values());
  meta["residual"] = centrality_residual(g, mu);
  write_json(dir / "centrality.json", meta);
  for (std::size_t i = 0; i < mu.size(); ++i) out << "mu_" << (i + 1) << " = " << format_double(mu[i]) << '\n';
  return kExitSuccess;
}

int cmd_simulate(const Invocation& inv, const ExperimentConfig& cfg, std::ostream& out) {
  const WeightedDigraph g = cfg.opinion_graph();
  const CentralityVector mu = centrality(g);
  const Vector x0 = cfg.initial_opinions();
  const SusceptibilityProfile z = cfg.initial_profile();
  const Trajectory traj = simulate_opinions(x0, z, g, cfg.integrator);
  const double predicted = predict_consensus(x0, z, mu);
  const double error = (traj.final_state().array() - predicted).abs().maxCoeff();

  const fs::path dir = output_dir(inv, &cfg);
  write_trajectory_csv(dir / "opinions.csv", traj, "x");
  json meta = metadata(inv, cfg.source, cfg.seed);
  meta["integrator"] = to_json(cfg.integrator);
  meta["x0"] = to_json(x0);
  meta["z"] = to_json(z.values());
  meta["terminated_by"] = std::string(to_string(traj.terminated_by));
  meta["final_time"] = traj.final_time();
  meta["terminal_state"] = to_json(traj.final_state());
  meta["predicted_consensus"] = predicted;
  meta["max_abs_deviation_from_prediction"] = error;
  meta["consensus_variance"] = consensus_variance(z, mu, cfg.sigma2);
  write_json(dir / "simulate.json", meta);
  out << "terminal opinions reached at t = " << format_double(traj.final_time()) << " ("
      << to_string(traj.terminated_by) << ")\npredicted consensus " << format_double(predicted)
      << ", max deviation " << error << '\n';
  return kExitSuccess;
}

int cmd_learn(const Invocation& inv, const ExperimentConfig& cfg, std::ostream& out) {
  const LearningProblem problem = cfg.learning_problem();
  const SusceptibilityProfile z0 = cfg.initial_profile();
  LearnSettings settings;
  settings.integrator = cfg.integrator;
  settings.coordinates = cfg.coordinates;
  const LearnResult r = learn(z0, problem, settings);
  const LearnDiagnostics& d = r.diagnostics;

  const fs::path dir = output_dir(inv, &cfg);
  write_trajectory_csv(dir / "trajectory_z.csv", r.z_trajectory, "z");
  write_trajectory_csv(dir / "trajectory_y.csv", r.y_trajectory, "y");
  json meta = metadata(inv, cfg.source, cfg.seed);
  meta["problem"] = {{"mu", to_json(problem.mu().values())},
                     {"sigma2", to_json(problem.sigma2())},
                     {"learning_graph", to_json(problem.learning_graph().weights())}};
  meta["z0_seed"] = cfg.z0.values ? json(nullptr) : json(cfg.z0.seed);
  meta["integrator"] = to_json(settings.integrator);
  meta["coordinates"] = std::string(to_string(settings.coordinates));
  meta["terminated_by"] = std::string(to_string(d.terminated_by));
  meta["final_time"] = r.z_trajectory.final_time();
  meta["z0"] = to_json(z0.values());
  meta["z_limit"] = to_json(r.z_limit.values());
  meta["distance_to_optimal"] = d.distance_to_optimal;
  meta["zeta"] = d.zeta;
  meta["hull"] = {d.hull_lower, d.hull_upper};
  meta["final_relative_spread"] = d.final_spread;
  meta["converged"] = d.converged;
  meta["hull_monotone"] = d.hull_monotone;
  meta["strictly_positive"] = d.strictly_positive;
  meta["consensus_variance"] = consensus_variance(r.z_limit, problem.mu(), problem.sigma2());
  meta["optimal_variance"] = optimal_variance(problem.sigma2());
  write_json(dir / "learn.json", meta);
  out << (d.converged ? "converged" : "did not converge") << " at t = "
      << format_double(r.z_trajectory.final_time()) << ", relative y-spread " << d.final_spread
      << ", zeta " << format_double(d.zeta) << '\n';
  return kExitSuccess;
}

int cmd_montecarlo(const Invocation& inv, const ExperimentConfig& cfg, std::ostream& out) {
  const WeightedDigraph g = cfg.opinion_graph();
  const SusceptibilityProfile z = cfg.initial_profile();
  const NoiseModel noise(cfg.theta, cfg.sigma2);
  const MonteCarloResult mc = monte_carlo_variance(z, g, noise, cfg.montecarlo.trials,
                                                   cfg.montecarlo.seed, cfg.montecarlo.distribution);
  const fs::path dir = output_dir(inv, &cfg);
  std::ostringstream csv;
  csv << "trials,seed,mean,variance,stderr,analytic_variance\n"
      << mc.trials << ',' << mc.seed << ',' << format_double(mc.mean) << ','
      << format_double(mc.variance) << ',' << format_double(mc.variance_stderr) << ','
      << format_double(mc.analytic_variance) << '\n';
  write_text_file(dir / "montecarlo.csv", csv.str());
  json meta = metadata(inv, cfg.source, cfg.montecarlo.seed);
  meta["distribution"] = std::string(to_string(cfg.montecarlo.distribution));
  meta["z"] = to_json(z.values());
  meta["mean_stderr"] = mc.mean_stderr;
  meta["variance_stderr"] = mc.variance_stderr;
  write_json(dir / "montecarlo.json", meta);
  out << "variance " << format_double(mc.variance) << " +- " << mc.variance_stderr
      << " (closed form " << format_double(mc.analytic_variance) << "), mean "
      << format_double(mc.mean) << " +- " << mc.mean_stderr << '\n';
  return kExitSuccess;
}

int cmd_verify(const Invocation& inv, const ExperimentConfig& cfg, std::ostream& out) {
  VerifyTarget target{cfg.opinion_graph(), cfg.learning_problem(), cfg.theta, cfg.initial_profile()};
  VerifySettings settings;
  settings.seed = cfg.seed;
  const std::vector<CheckResult> checks = run_invariant_suite(target, settings);

  bool all_passed = true;
  json report = json::array();
  for (const CheckResult& c : checks) {
    all_passed = all_passed && c.passed;
    report.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  json doc = metadata(inv, cfg.source, cfg.seed);
  doc["checks"] = report;
  doc["all_passed"] = all_passed;
  write_json(output_dir(inv, &cfg) / "verify.json", doc);
  return all_passed ? kExitSuccess : kExitVerificationFailed;
}

int cmd_paper(const Invocation& inv, const ExperimentConfig* cfg, std::ostream& out) {
  const std::uint64_t seed = inv.seed.value_or(cfg ? cfg->seed : 1);
  const fs::path dir = output_dir(inv, cfg);
  const FigureYReport fy = reproduce_figure_y(seed, dir);
  const FigureZReport fz = reproduce_figure_z(seed, dir);
  const PaperExample ex = build_paper_example();

  json checks = {{"y_consensus", fy.consensus},
                 {"hull_monotone", fy.hull_monotone},
                 {"zeta_in_initial_hull", fy.zeta_in_hull},
                 {"three_groups", fz.groups_match && fz.groups.size() == 3},
                 {"within_group_spread_below_1e-6", fz.max_within_group_spread < 1e-6}};
  bool all_passed = true;
  for (const auto& [name, ok] : checks.items()) {
    all_passed = all_passed && ok.get<bool>();
    out << (ok.get<bool>() ? "PASS " : "FAIL ") << name << '\n';
  }
  json doc = metadata(inv, cfg ? cfg->source : json(nullptr), seed);
  doc["mu"] = to_json(ex.mu.values());
  doc["sigma2"] = to_json(ex.sigma2);
  doc["z0"] = to_json(fy.z0.values());
  doc["z_limit"] = to_json(fz.run.z_limit.values());
  doc["zeta"] = fy.run.diagnostics.zeta;
  doc["hull"] = {fy.run.diagnostics.hull_lower, fy.run.diagnostics.hull_upper};
  doc["checks"] = checks;
  doc["all_passed"] = all_passed;
  write_json(dir / "paper.json", doc);
  return all_passed ? kExitSuccess : kExitVerificationFailed;
}

int dispatch(const Invocation& inv, std::ostream& out) {
  if (inv.command == "paper") {
    if (inv.config_path.empty()) return cmd_paper(inv, nullptr, out);
    ExperimentConfig cfg = load_config(inv.config_path);
    if (inv.seed) cfg.override_seed(*inv.seed);
    return cmd_paper(inv, &cfg, out);
  }
  if (inv.config_path.empty()) throw ConfigError("--config is required for '" + inv.command + "'");
  ExperimentConfig cfg = load_config(inv.config_path);
  if (inv.seed) cfg.override_seed(*inv.seed);
  if (inv.command == "centrality") return cmd_centrality(inv, cfg, out);
  if (inv.command == "simulate") return cmd_simulate(inv, cfg, out);
  if (inv.command == "learn") return cmd_learn(inv, cfg, out);
  if (inv.command == "montecarlo") return cmd_montecarlo(inv, cfg, out);
  return cmd_verify(inv, cfg, out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collective-wisdom susceptibility learning simulator", "wisdomdyn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Invocation inv;
  const std::pair<const char*, const char*> commands[] = {
      {"centrality", "Compute the eigenvector centrality of the social graph"},
      {"simulate", "Integrate the opinion dynamics and compare with the predicted consensus"},
      {"learn", "Run the distributed susceptibility learning dynamics"},
      {"montecarlo", "Estimate the consensus variance by Monte Carlo"},
      {"verify", "Run the invariant suite and write verify.json"},
      {"paper", "Reproduce the six-agent example and its figures"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "Experiment config (JSON)");
    sub->add_option("--out", inv.out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--seed", inv.seed, "Seed overriding every seed in the config");
    sub->callback([&inv, cmd = std::string(name)] { inv.command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    return dispatch(inv, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const NotStronglyConnected& e) {
    err << "NotStronglyConnected: " << e.what() << '\n';
  } catch (const ZeroRow& e) {
    err << "ZeroRow: " << e.what() << '\n';
  } catch (const IsolatedAgent& e) {
    err << "IsolatedAgent: " << e.what() << '\n';
  } catch (const MissingSelfLoop& e) {
    err << "MissingSelfLoop: " << e.what() << '\n';
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
  } catch (const NonPositiveInput& e) {
    err << "NonPositiveInput: " << e.what() << '\n';
  } catch (const DimensionMismatch& e) {
    err << "DimensionMismatch: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
  return kExitUsage;
}

}  // namespace wisdomdyn
