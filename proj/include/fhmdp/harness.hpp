#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fhmdp/mdp.hpp"
#include "fhmdp/qlearning.hpp"
#include "fhmdp/random_mdp.hpp"
#include "fhmdp/smart_grid.hpp"

namespace fhmdp::harness {

// Summary of one training run. wall_time_seconds is reported on stdout only;
// output files must be byte-identical across reruns, so no timing goes into
// them.
struct ResultRecord {
  std::string setting;
  double epsilon = 0.0;
  double final_error = 0.0;
  long iterations = 0;
  bool converged = false;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Exact solve only: writes q_dp.csv, values.csv, policy.csv.
void run_solve_dp(const FiniteHorizonMdp& mdp,
                  const std::filesystem::path& out_dir);

// Trains against the exact solution as oracle; writes trace.csv,
// q_final.csv, q_dp.csv, summary.json.
ResultRecord run_train(const FiniteHorizonMdp& mdp,
                       const fhql::LearnerConfig& learner,
                       const std::string& setting,
                       const std::filesystem::path& out_dir);

struct RandomMdpExperiment {
  RandomMdpSpec spec;
  fhql::LearnerConfig learner;
  // Decision stages to snapshot; empty selects first, middle, penultimate.
  std::vector<int> stage_snapshots;
};

// Generates the instance, trains, and adds per-stage value and policy
// snapshots (stage_<n>_values.csv, stage_<n>_policy.csv) to run_train's
// artifacts.
ResultRecord run_random_mdp_experiment(const RandomMdpExperiment& experiment,
                                       const std::filesystem::path& out_dir);

struct SmartGridExperiment {
  grid::GridConfig grid;
  fhql::LearnerConfig learner;
  long episodes = 10000;
  std::uint64_t eval_seed = 1;
  // Evaluate both with and without renewables, same seeds, instead of only
  // the configured mode.
  bool compare_renewables = false;
};

struct ComparisonRow {
  std::string scenario;
  std::string algorithm;
  double avg_cost = 0.0;
  double std_err = 0.0;
  long episodes = 0;
  std::uint64_t seed = 0;
};

// Compiles the scenario, trains the learner, and evaluates it against the
// fill-demand and fill-battery baselines with shared evaluation streams.
// Writes comparison.csv; per-mode training summaries go to stdout.
std::vector<ComparisonRow> run_smart_grid_experiment(
    const SmartGridExperiment& experiment,
    const std::filesystem::path& out_dir);

struct DiagnosticsConfig {
  // Explicit instance to probe; generated from spec when absent.
  std::optional<FiniteHorizonMdp> instance;
  RandomMdpSpec spec;
  int lipschitz_trials = 1000;
  double ball_radius = 10.0;
  long noise_samples = 100000;
  double euler_dt = 0.1;
  int euler_steps = 2000;
  int euler_starts = 10;
  long schedule_terms = 1000000;
  int schedule_block_length = 10;
  std::uint64_t probe_seed = 1;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs the numeric health checks (instance validation, field fixed points,
// Lipschitz probes, Euler flows, update-noise probe, step schedule sums) on
// a generated instance, writing <name>.json per check.
std::vector<CheckResult> run_diagnostics(const DiagnosticsConfig& config,
                                         const std::filesystem::path& out_dir);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace fhmdp::harness
