#include "fhmdp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "fhmdp/dp.hpp"
#include "fhmdp/format.hpp"
#include "fhmdp/ode_checks.hpp"

namespace fhmdp::harness {

namespace {

using nlohmann::json;

constexpr double kFixedPointTolerance = 1e-10;
constexpr double kLipschitzBound = 2.0 + 1e-9;
constexpr double kEulerTolerance = 1e-4;
constexpr double kScheduleSquareTolerance = 1e-3;
constexpr double kScheduleSumFloor = 100.0;

// Probe stream tags.
constexpr std::uint64_t kTagLipschitzH = 1;
constexpr std::uint64_t kTagLipschitzHInf = 2;
constexpr std::uint64_t kTagEulerH = 3;
constexpr std::uint64_t kTagEulerHInf = 4;
constexpr std::uint64_t kTagNoise = 5;

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << body;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string dump_q_csv(const FiniteHorizonMdp& mdp, const QTable& q) {
  std::ostringstream out;
  out << "stage,state,action,q\n";
  for (int n = 0; n <= mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      for (int a : mdp.feasible_actions(i))
        out << n << ',' << i << ',' << a << ','
            << format_double(q.at(n, i, a)) << '\n';
  return out.str();
}

std::string setting_label(const FiniteHorizonMdp& mdp) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%d,%d,%d)", mdp.horizon(),
                mdp.num_states(), mdp.num_actions());
  return buf;
}

std::string scenario_label(const grid::GridConfig& config) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "h%d_d%d_b%d_p%d%s", config.horizon,
                config.d_max, config.b_max, config.p_max,
                config.renewables_enabled ? "_renewables" : "");
  return buf;
}

void print_record(const ResultRecord& record) {
  std::cout << "[train] setting=" << record.setting
            << " epsilon=" << format_double(record.epsilon)
            << " final_error=" << format_double(record.final_error)
            << " iterations=" << record.iterations
            << " converged=" << (record.converged ? "yes" : "no")
            << " wall_time=" << format_double(record.wall_time_seconds)
            << "s seed=" << record.seed << '\n';
}

struct TrainedArtifacts {
  fhql::RunResult run;
  QTable q_dp;
  ResultRecord record;
};

TrainedArtifacts train_and_write(const FiniteHorizonMdp& mdp,
                                 const fhql::LearnerConfig& learner,
                                 const std::string& setting,
                                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  QTable q_dp = dp::solve(mdp);
  auto start = std::chrono::steady_clock::now();
  fhql::RunResult run = fhql::run(mdp, learner, &q_dp);
  std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;

  ResultRecord record;
  record.setting = setting;
  record.epsilon = learner.epsilon;
  record.final_error = fhql::sup_error(run.q, q_dp);
  record.iterations = run.iterations;
  record.converged = run.converged;
  record.wall_time_seconds = elapsed.count();
  record.seed = learner.seed;

  std::ostringstream trace;
  fhql::write_trace_csv(run.trace, trace);
  write_file(out_dir / "trace.csv", trace.str());
  write_file(out_dir / "q_final.csv", dump_q_csv(mdp, run.q));
  write_file(out_dir / "q_dp.csv", dump_q_csv(mdp, q_dp));

  json summary{{"setting", record.setting},
               {"epsilon", record.epsilon},
               {"final_error", record.final_error},
               {"iterations", record.iterations},
               {"converged", record.converged},
               {"seed", record.seed}};
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");

  print_record(record);
  return {std::move(run), std::move(q_dp), std::move(record)};
}

// Random table with every feasible entry uniform on [-radius, radius] and
// the terminal layer pinned to the field's equilibrium values.
QTable random_flow_start(const FiniteHorizonMdp& mdp, double radius, Rng& rng,
                         bool terminal_at_cost) {
  QTable q = zeros_like(mdp);
  for (int n = 0; n <= mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      for (int a : mdp.feasible_actions(i))
        q.at(n, i, a) = rng.next_uniform(-radius, radius);
  for (int i = 0; i < mdp.num_states(); ++i)
    for (int a : mdp.feasible_actions(i))
      q.at(mdp.horizon(), i, a) =
          terminal_at_cost ? mdp.terminal_cost(i) : 0.0;
  return q;
}

}  // namespace

void run_solve_dp(const FiniteHorizonMdp& mdp,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  QTable q_dp = dp::solve(mdp);
  write_file(out_dir / "q_dp.csv", dump_q_csv(mdp, q_dp));

  StageValueFunction values = q_to_value(mdp, q_dp);
  std::ostringstream value_csv;
  value_csv << "stage,state,value\n";
  for (int n = 0; n <= mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      value_csv << n << ',' << i << ',' << format_double(values.at(n, i))
                << '\n';
  write_file(out_dir / "values.csv", value_csv.str());

  NonstationaryPolicy pi = greedy_policy(mdp, q_dp);
  std::ostringstream policy_csv;
  policy_csv << "stage,state,action\n";
  for (int n = 0; n < mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      policy_csv << n << ',' << i << ',' << pi.action(n, i) << '\n';
  write_file(out_dir / "policy.csv", policy_csv.str());
}

ResultRecord run_train(const FiniteHorizonMdp& mdp,
                       const fhql::LearnerConfig& learner,
                       const std::string& setting,
                       const std::filesystem::path& out_dir) {
  return train_and_write(mdp, learner, setting, out_dir).record;
}

ResultRecord run_random_mdp_experiment(const RandomMdpExperiment& experiment,
                                       const std::filesystem::path& out_dir) {
  FiniteHorizonMdp mdp = generate_random_mdp(experiment.spec);
  TrainedArtifacts artifacts =
      train_and_write(mdp, experiment.learner, setting_label(mdp), out_dir);

  int N = mdp.horizon();
  std::vector<int> stages = experiment.stage_snapshots;
  if (stages.empty()) stages = {0, N / 2, N - 1};
  std::sort(stages.begin(), stages.end());
  stages.erase(std::unique(stages.begin(), stages.end()), stages.end());
  for (int n : stages)
    if (n < 0 || n >= N)
      throw std::invalid_argument("stage snapshot out of range");

  StageValueFunction learned_values = q_to_value(mdp, artifacts.run.q);
  StageValueFunction dp_values = q_to_value(mdp, artifacts.q_dp);
  NonstationaryPolicy learned_policy = greedy_policy(mdp, artifacts.run.q);
  NonstationaryPolicy dp_policy = greedy_policy(mdp, artifacts.q_dp);
  for (int n : stages) {
    std::ostringstream values;
    values << "state,J_learned,J_dp\n";
    for (int i = 0; i < mdp.num_states(); ++i)
      values << i << ',' << format_double(learned_values.at(n, i)) << ','
             << format_double(dp_values.at(n, i)) << '\n';
    write_file(out_dir / ("stage_" + std::to_string(n) + "_values.csv"),
               values.str());

    std::ostringstream policy;
    policy << "state,action_learned,action_dp\n";
    for (int i = 0; i < mdp.num_states(); ++i)
      policy << i << ',' << learned_policy.action(n, i) << ','
             << dp_policy.action(n, i) << '\n';
    write_file(out_dir / ("stage_" + std::to_string(n) + "_policy.csv"),
               policy.str());
  }
  return artifacts.record;
}

std::vector<ComparisonRow> run_smart_grid_experiment(
    const SmartGridExperiment& experiment,
    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<bool> modes;
  if (experiment.compare_renewables)
    modes = {false, true};
  else
    modes = {experiment.grid.renewables_enabled};

  std::vector<ComparisonRow> rows;
  for (bool renewables : modes) {
    grid::GridConfig config = experiment.grid;
    config.renewables_enabled = renewables;
    FiniteHorizonMdp mdp = grid::to_mdp(config);
    QTable q_dp = dp::solve(mdp);

    auto start = std::chrono::steady_clock::now();
    fhql::RunResult run = fhql::run(mdp, experiment.learner, &q_dp);
    std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;

    ResultRecord record;
    record.setting = scenario_label(config);
    record.epsilon = experiment.learner.epsilon;
    record.final_error = fhql::sup_error(run.q, q_dp);
    record.iterations = run.iterations;
    record.converged = run.converged;
    record.wall_time_seconds = elapsed.count();
    record.seed = experiment.learner.seed;
    print_record(record);

    grid::PolicyFn learned =
        grid::policy_from_table(config, greedy_policy(mdp, run.q));
    grid::PolicyFn fill_demand = [config](int, const grid::GridState& s) {
      return grid::fill_demand_policy(config, s);
    };
    grid::PolicyFn fill_battery = [config](int, const grid::GridState& s) {
      return grid::fill_battery_policy(config, s);
    };

    const std::pair<const char*, const grid::PolicyFn*> algorithms[] = {
        {"fhql", &learned},
        {"fill_demand", &fill_demand},
        {"fill_battery", &fill_battery}};
    for (auto [name, policy] : algorithms) {
      // Fresh stream per algorithm: identical episode randomness, so cost
      // gaps come from the policies alone.
      Rng eval(experiment.eval_seed);
      grid::EvaluationResult result = grid::evaluate_average_cost(
          config, *policy, experiment.episodes, eval);
      rows.push_back({record.setting, name, result.mean_cost, result.std_err,
                      result.episodes, experiment.eval_seed});
    }
  }

  std::ostringstream csv;
  csv << "scenario,algorithm,avg_cost,std_err,episodes,seed\n";
  for (const ComparisonRow& row : rows)
    csv << row.scenario << ',' << row.algorithm << ','
        << format_double(row.avg_cost) << ',' << format_double(row.std_err)
        << ',' << row.episodes << ',' << row.seed << '\n';
  write_file(out_dir / "comparison.csv", csv.str());
  return rows;
}

std::vector<CheckResult> run_diagnostics(const DiagnosticsConfig& config,
                                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<CheckResult> results;
  auto emit = [&](const std::string& name, bool passed, json payload,
                  const std::string& detail) {
    payload["name"] = name;
    payload["passed"] = passed;
    write_file(out_dir / (name + ".json"), payload.dump(2) + "\n");
    results.push_back({name, passed, detail});
    std::cout << "[diagnostics] " << name << ": "
              << (passed ? "pass" : "FAIL") << " (" << detail << ")\n";
  };

  FiniteHorizonMdp mdp = config.instance.has_value()
                             ? *config.instance
                             : generate_random_mdp(config.spec);
  std::vector<std::string> violations = validate(mdp);
  emit("validate_instance", violations.empty(), json{{"violations", violations}},
       std::to_string(violations.size()) + " violations");

  if (!violations.empty()) {
    // The probes below require a well-formed instance.
    for (const char* name :
         {"fixed_point", "lipschitz_h", "lipschitz_h_infinity", "euler_h",
          "euler_h_infinity", "noise"})
      emit(name, false, json::object(), "skipped: invalid instance");
  } else {
    QTable q_dp = dp::solve(mdp);

    double h_at_solution = sup_norm(ode::h_field(mdp, q_dp));
    double h_inf_at_origin =
        sup_norm(ode::h_infinity_field(mdp, zeros_like(mdp)));
    emit("fixed_point",
         h_at_solution <= kFixedPointTolerance && h_inf_at_origin == 0.0,
         json{{"h_at_solution", h_at_solution},
              {"h_infinity_at_origin", h_inf_at_origin},
              {"tolerance", kFixedPointTolerance}},
         "|h(Q*)|=" + format_double(h_at_solution));

    for (auto [name, kind, tag] :
         {std::tuple{"lipschitz_h", ode::FieldKind::h, kTagLipschitzH},
          std::tuple{"lipschitz_h_infinity", ode::FieldKind::h_infinity,
                     kTagLipschitzHInf}}) {
      Rng rng(mix_key(config.probe_seed, tag));
      ode::FieldProbeReport report = ode::lipschitz_probe(
          mdp, kind, config.lipschitz_trials, config.ball_radius, rng);
      emit(name, report.max_ratio <= kLipschitzBound,
           json{{"max_ratio", report.max_ratio},
                {"trials", report.trials},
                {"radius", config.ball_radius},
                {"bound", kLipschitzBound}},
           "max_ratio=" + format_double(report.max_ratio));
    }

    for (auto [name, kind, tag] :
         {std::tuple{"euler_h", ode::FieldKind::h, kTagEulerH},
          std::tuple{"euler_h_infinity", ode::FieldKind::h_infinity,
                     kTagEulerHInf}}) {
      Rng rng(mix_key(config.probe_seed, tag));
      double worst = 0.0;
      for (int s = 0; s < config.euler_starts; ++s) {
        QTable q0 = random_flow_start(mdp, config.ball_radius, rng,
                                      kind == ode::FieldKind::h);
        ode::EulerFlowResult flow =
            ode::euler_flow(mdp, q0, kind, config.euler_dt, config.euler_steps);
        worst = std::max(worst, flow.distance.back());
      }
      emit(name, worst <= kEulerTolerance,
           json{{"worst_final_distance", worst},
                {"starts", config.euler_starts},
                {"dt", config.euler_dt},
                {"steps", config.euler_steps},
                {"tolerance", kEulerTolerance}},
           "worst_final_distance=" + format_double(worst));
    }

    {
      Rng rng(mix_key(config.probe_seed, kTagNoise));
      ode::NoiseProbeReport report =
          ode::martingale_noise_probe(mdp, q_dp, config.noise_samples, rng);
      long allowed_mean_failures =
          (static_cast<long>(report.components.size()) + 9999) / 10000;
      bool passed = report.mean_test_failures <= allowed_mean_failures &&
                    report.second_moment_failures == 0;
      emit("noise", passed,
           json{{"samples", report.samples},
                {"components", report.components.size()},
                {"mean_test_failures", report.mean_test_failures},
                {"allowed_mean_failures", allowed_mean_failures},
                {"second_moment_failures", report.second_moment_failures},
                {"bound_constant", report.bound_constant},
                {"q_sup", report.q_sup}},
           "mean_failures=" + std::to_string(report.mean_test_failures) +
               " moment_failures=" +
               std::to_string(report.second_moment_failures));
    }
  }

  {
    fhql::StepSchedule schedule{config.schedule_block_length};
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long m = 0; m < config.schedule_terms; ++m) {
      double a = fhql::step_size(m, schedule);
      sum += a;
      sum_sq += a * a;
    }
    double limit =
        config.schedule_block_length * std::numbers::pi * std::numbers::pi / 6.0;
    bool passed = std::abs(sum_sq - limit) <= kScheduleSquareTolerance &&
                  sum >= kScheduleSumFloor;
    emit("step_schedule", passed,
         json{{"terms", config.schedule_terms},
              {"block_length", config.schedule_block_length},
              {"sum", sum},
              {"sum_of_squares", sum_sq},
              {"square_series_limit", limit},
              {"square_tolerance", kScheduleSquareTolerance},
              {"sum_floor", kScheduleSumFloor}},
         "sum=" + format_double(sum) +
             " sum_sq=" + format_double(sum_sq));
  }

  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& result : results)
    if (!result.passed) return false;
  return true;
}

}  // namespace fhmdp::harness
