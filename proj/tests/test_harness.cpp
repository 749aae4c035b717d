#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "fhmdp/dp.hpp"
#include "fhmdp/harness.hpp"
#include "fhmdp/mdp.hpp"
#include "fhmdp/random_mdp.hpp"
#include "fhmdp/smart_grid.hpp"

using namespace fhmdp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "fhmdp_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Parses stage,state,action,q rows back into a table.
QTable parse_q_csv(const FiniteHorizonMdp& mdp, const std::string& body) {
  QTable q = zeros_like(mdp);
  std::istringstream in(body);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "stage,state,action,q");
  while (std::getline(in, line)) {
    int n = 0;
    int i = 0;
    int a = 0;
    char* cursor = line.data();
    n = static_cast<int>(std::strtol(cursor, &cursor, 10));
    ++cursor;
    i = static_cast<int>(std::strtol(cursor, &cursor, 10));
    ++cursor;
    a = static_cast<int>(std::strtol(cursor, &cursor, 10));
    ++cursor;
    q.at(n, i, a) = std::strtod(cursor, nullptr);
  }
  return q;
}

}  // namespace

TEST_CASE("harness: run_train writes recomputable artifacts") {
  fs::path dir = fresh_dir("train");
  FiniteHorizonMdp mdp = generate_random_mdp({4, 3, 2, 0.0, 1.0, 0.0, 1.0, 7});
  fhql::LearnerConfig learner;
  learner.epsilon = 0.05;
  learner.seed = 11;
  harness::ResultRecord record = harness::run_train(mdp, learner, "(4,3,2)", dir);

  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "q_final.csv"));
  CHECK(fs::exists(dir / "q_dp.csv"));
  CHECK(fs::exists(dir / "summary.json"));

  json summary = json::parse(read_file(dir / "summary.json"));
  CHECK(summary.at("setting") == "(4,3,2)");
  CHECK(summary.at("epsilon") == 0.05);
  CHECK(summary.at("iterations").get<long>() == record.iterations);
  CHECK(summary.at("converged").get<bool>() == record.converged);
  CHECK(summary.at("seed").get<std::uint64_t>() == 11);
  // Timing never lands in the files, or reruns could not be byte-identical.
  CHECK_FALSE(summary.contains("wall_time_seconds"));

  // The summary error must be recomputable from the emitted tables alone.
  QTable q_final = parse_q_csv(mdp, read_file(dir / "q_final.csv"));
  QTable q_dp = parse_q_csv(mdp, read_file(dir / "q_dp.csv"));
  CHECK(summary.at("final_error").get<double>() == sup_diff(q_final, q_dp));
  CHECK(sup_diff(q_dp, dp::solve(mdp)) == 0.0);

  std::string trace = read_file(dir / "trace.csv");
  CHECK(trace.rfind("iteration,delta,error,step_size\n", 0) == 0);

  // Reruns are byte-identical.
  fs::path dir2 = fresh_dir("train_rerun");
  harness::run_train(mdp, learner, "(4,3,2)", dir2);
  for (const char* name : {"trace.csv", "q_final.csv", "q_dp.csv", "summary.json"})
    CHECK(read_file(dir / name) == read_file(dir2 / name));
}

TEST_CASE("harness: run_solve_dp writes values and greedy policy") {
  fs::path dir = fresh_dir("solve_dp");
  FiniteHorizonMdp mdp = generate_random_mdp({3, 3, 2, 0.0, 1.0, 0.0, 1.0, 9});
  harness::run_solve_dp(mdp, dir);
  QTable q_dp = parse_q_csv(mdp, read_file(dir / "q_dp.csv"));
  CHECK(sup_diff(q_dp, dp::solve(mdp)) == 0.0);
  std::string values = read_file(dir / "values.csv");
  CHECK(values.rfind("stage,state,value\n", 0) == 0);
  std::string policy = read_file(dir / "policy.csv");
  CHECK(policy.rfind("stage,state,action\n", 0) == 0);
  // One row per (stage, state): header + N*S for the policy, (N+1)*S values.
  CHECK(std::count(policy.begin(), policy.end(), '\n') == 1 + 3 * 3);
  CHECK(std::count(values.begin(), values.end(), '\n') == 1 + 4 * 3);
}

TEST_CASE("harness: random-mdp experiment snapshots stages") {
  fs::path dir = fresh_dir("random_mdp");
  harness::RandomMdpExperiment experiment;
  experiment.spec = {7, 4, 2, 0.0, 1.0, 0.0, 1.0, 21};
  experiment.learner.epsilon = 0.1;
  experiment.learner.seed = 5;
  harness::run_random_mdp_experiment(experiment, dir);
  // Default snapshots: first, middle, penultimate stage.
  for (const char* name :
       {"stage_0_values.csv", "stage_3_values.csv", "stage_6_values.csv",
        "stage_0_policy.csv", "stage_3_policy.csv", "stage_6_policy.csv"})
    CHECK(fs::exists(dir / name));

  std::string values = read_file(dir / "stage_0_values.csv");
  CHECK(values.rfind("state,J_learned,J_dp\n", 0) == 0);
  std::string policy = read_file(dir / "stage_0_policy.csv");
  CHECK(policy.rfind("state,action_learned,action_dp\n", 0) == 0);
  CHECK(std::count(values.begin(), values.end(), '\n') == 1 + 4);

  // The J_dp column reproduces the exact solve of the same seeded instance.
  FiniteHorizonMdp mdp = generate_random_mdp(experiment.spec);
  StageValueFunction expect = q_to_value(mdp, dp::solve(mdp));
  std::istringstream in(values);
  std::string line;
  std::getline(in, line);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(std::getline(in, line));
    std::size_t last_comma = line.rfind(',');
    CHECK(std::strtod(line.c_str() + last_comma + 1, nullptr) ==
          expect.at(0, i));
  }

  harness::RandomMdpExperiment dup = experiment;
  dup.stage_snapshots = {2, 2, 5};
  fs::path dir2 = fresh_dir("random_mdp_custom");
  harness::run_random_mdp_experiment(dup, dir2);
  CHECK(fs::exists(dir2 / "stage_2_values.csv"));
  CHECK(fs::exists(dir2 / "stage_5_values.csv"));
  CHECK_FALSE(fs::exists(dir2 / "stage_0_values.csv"));

  harness::RandomMdpExperiment bad = experiment;
  bad.stage_snapshots = {7};  // horizon itself is not a decision stage
  CHECK_THROWS_AS(
      harness::run_random_mdp_experiment(bad, fresh_dir("random_mdp_bad")),
      std::invalid_argument);
}

TEST_CASE("harness: smart grid comparison rows and csv") {
  harness::SmartGridExperiment experiment;
  experiment.grid = grid::default_config(2, 1, 1, 1, false);
  experiment.learner.epsilon = 0.2;
  experiment.learner.max_iterations = 2000;
  experiment.learner.seed = 3;
  experiment.episodes = 200;
  experiment.eval_seed = 17;

  fs::path dir = fresh_dir("grid_single");
  std::vector<harness::ComparisonRow> rows =
      harness::run_smart_grid_experiment(experiment, dir);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].algorithm == "fhql");
  CHECK(rows[1].algorithm == "fill_demand");
  CHECK(rows[2].algorithm == "fill_battery");
  for (const auto& row : rows) {
    CHECK(row.scenario == "h2_d1_b1_p1");
    CHECK(row.episodes == 200);
    CHECK(row.seed == 17);
    CHECK(row.avg_cost >= 0.0);
  }
  std::string csv = read_file(dir / "comparison.csv");
  CHECK(csv.rfind("scenario,algorithm,avg_cost,std_err,episodes,seed\n", 0) ==
        0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  fs::path dir2 = fresh_dir("grid_rerun");
  harness::run_smart_grid_experiment(experiment, dir2);
  CHECK(read_file(dir / "comparison.csv") == read_file(dir2 / "comparison.csv"));

  experiment.compare_renewables = true;
  fs::path dir3 = fresh_dir("grid_compare");
  rows = harness::run_smart_grid_experiment(experiment, dir3);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].scenario == "h2_d1_b1_p1");
  CHECK(rows[3].scenario == "h2_d1_b1_p1_renewables");
}

TEST_CASE("harness: diagnostics pass on a healthy instance") {
  fs::path dir = fresh_dir("diagnostics");
  harness::DiagnosticsConfig config;
  config.spec = {3, 3, 2, 0.0, 1.0, 0.0, 1.0, 3};
  config.lipschitz_trials = 50;
  config.noise_samples = 2000;
  config.euler_steps = 400;
  config.euler_starts = 2;
  config.schedule_terms = 1000000;
  std::vector<harness::CheckResult> results =
      harness::run_diagnostics(config, dir);
  REQUIRE(results.size() == 8);
  for (const auto& result : results) CHECK(result.passed);
  CHECK(harness::all_passed(results));
  const char* names[] = {"validate_instance", "fixed_point",  "lipschitz_h",
                         "lipschitz_h_infinity", "euler_h",   "euler_h_infinity",
                         "noise",             "step_schedule"};
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(results[k].name == names[k]);
    CHECK(fs::exists(dir / (std::string(names[k]) + ".json")));
  }
  json fixed_point = json::parse(read_file(dir / "fixed_point.json"));
  CHECK(fixed_point.at("passed").get<bool>());
  CHECK(fixed_point.at("h_at_solution").get<double>() <= 1e-10);
  json noise = json::parse(read_file(dir / "noise.json"));
  CHECK(noise.at("samples").get<long>() == 2000);
}

TEST_CASE("harness: diagnostics flag a corrupted instance and skip probes") {
  fs::path dir = fresh_dir("diagnostics_bad");
  harness::DiagnosticsConfig config;
  // Kernel row deliberately scaled to 0.9.
  config.instance = FiniteHorizonMdp(1, 1, 1, {{0}}, {0.9}, {1.0}, {0.0});
  std::vector<harness::CheckResult> results =
      harness::run_diagnostics(config, dir);
  REQUIRE(results.size() == 8);
  CHECK_FALSE(results[0].passed);
  for (std::size_t k = 1; k < 7; ++k) {
    CHECK_FALSE(results[k].passed);
    CHECK(results[k].detail == "skipped: invalid instance");
  }
  CHECK(results[7].name == "step_schedule");
  CHECK(results[7].passed);
  CHECK_FALSE(harness::all_passed(results));
  json validation = json::parse(read_file(dir / "validate_instance.json"));
  CHECK_FALSE(validation.at("passed").get<bool>());
  CHECK(validation.at("violations").size() == 1);
}
