#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhmdp/harness.hpp"
#include "fhmdp/io.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return json::parse(in);
}

// Instance from an embedded document or a generator spec. A --seed override
// replaces the generator seed from the config.
fhmdp::FiniteHorizonMdp resolve_instance(const json& config,
                                         std::optional<std::uint64_t> seed) {
  if (config.contains("mdp"))
    return fhmdp::io::mdp_from_json(config.at("mdp"));
  if (config.contains("spec")) {
    fhmdp::RandomMdpSpec spec =
        fhmdp::io::random_spec_from_json(config.at("spec"));
    if (seed.has_value()) spec.seed = *seed;
    return fhmdp::generate_random_mdp(spec);
  }
  throw std::invalid_argument("config needs either \"mdp\" or \"spec\"");
}

fhmdp::fhql::LearnerConfig resolve_learner(const json& config,
                                           std::optional<std::uint64_t> seed) {
  fhmdp::fhql::LearnerConfig learner;
  if (config.contains("learner"))
    learner = fhmdp::io::learner_from_json(config.at("learner"));
  if (seed.has_value()) learner.seed = *seed;
  return learner;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite horizon MDP toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_value = 0;
  CLI::Option* seed_option = nullptr;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory")->required();
    seed_option = cmd->add_option("--seed", seed_value,
                                  "override the seeds in the config");
  };

  CLI::App* solve_dp = app.add_subcommand(
      "solve-dp", "exact backward solve of an instance");
  CLI::App* train =
      app.add_subcommand("train", "train the learner on an instance");
  CLI::App* random_mdp = app.add_subcommand(
      "random-mdp", "train on a generated instance with stage snapshots");
  CLI::App* smart_grid = app.add_subcommand(
      "smart-grid", "battery storage scenario against baselines");
  CLI::App* diagnostics =
      app.add_subcommand("diagnostics", "numeric health checks");
  for (CLI::App* cmd :
       {solve_dp, train, random_mdp, smart_grid, diagnostics})
    add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::optional<std::uint64_t> seed;
  if (seed_option != nullptr && seed_option->count() > 0) seed = seed_value;

  try {
    json config = load_config(config_path);

    if (app.got_subcommand(solve_dp)) {
      fhmdp::harness::run_solve_dp(resolve_instance(config, seed), out_dir);
    } else if (app.got_subcommand(train)) {
      fhmdp::FiniteHorizonMdp mdp = resolve_instance(config, seed);
      fhmdp::harness::run_train(mdp, resolve_learner(config, seed), "",
                                out_dir);
    } else if (app.got_subcommand(random_mdp)) {
      fhmdp::harness::RandomMdpExperiment experiment;
      experiment.spec =
          fhmdp::io::random_spec_from_json(config.at("spec"));
      experiment.learner = resolve_learner(config, seed);
      if (seed.has_value()) experiment.spec.seed = *seed;
      if (config.contains("stage_snapshots"))
        experiment.stage_snapshots =
            config.at("stage_snapshots").get<std::vector<int>>();
      fhmdp::harness::run_random_mdp_experiment(experiment, out_dir);
    } else if (app.got_subcommand(smart_grid)) {
      fhmdp::harness::SmartGridExperiment experiment;
      experiment.grid = fhmdp::io::grid_config_from_json(config.at("grid"));
      experiment.learner = resolve_learner(config, seed);
      experiment.episodes =
          config.value("episodes", experiment.episodes);
      experiment.compare_renewables =
          config.value("compare_renewables", false);
      if (seed.has_value()) experiment.grid.seed = *seed;
      experiment.eval_seed = config.contains("eval_seed")
                                 ? config.at("eval_seed").get<std::uint64_t>()
                                 : experiment.grid.seed;
      fhmdp::harness::run_smart_grid_experiment(experiment, out_dir);
    } else if (app.got_subcommand(diagnostics)) {
      fhmdp::harness::DiagnosticsConfig dc;
      if (config.contains("mdp")) {
        dc.instance = fhmdp::io::mdp_from_json(config.at("mdp"));
      } else {
        dc.spec = fhmdp::io::random_spec_from_json(config.at("spec"));
        if (seed.has_value()) dc.spec.seed = *seed;
      }
      dc.lipschitz_trials =
          config.value("lipschitz_trials", dc.lipschitz_trials);
      dc.ball_radius = config.value("ball_radius", dc.ball_radius);
      dc.noise_samples = config.value("noise_samples", dc.noise_samples);
      dc.euler_dt = config.value("euler_dt", dc.euler_dt);
      dc.euler_steps = config.value("euler_steps", dc.euler_steps);
      dc.euler_starts = config.value("euler_starts", dc.euler_starts);
      dc.schedule_terms = config.value("schedule_terms", dc.schedule_terms);
      dc.schedule_block_length =
          config.value("schedule_block_length", dc.schedule_block_length);
      dc.probe_seed = config.value("probe_seed", dc.spec.seed);
      if (seed.has_value()) dc.probe_seed = *seed;
      std::vector<fhmdp::harness::CheckResult> results =
          fhmdp::harness::run_diagnostics(dc, out_dir);
      if (!fhmdp::harness::all_passed(results)) return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
