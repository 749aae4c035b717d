#include "fhmdp/qlearning.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "fhmdp/format.hpp"

namespace fhmdp::fhql {

namespace {

// Stream tag for single_sample pair selection, kept distinct from the
// per-update sweep keys.
constexpr std::uint64_t kSingleSampleTag = 0x51u;

std::uint64_t update_key(std::uint64_t seed, long m, int n, int i, int a) {
  std::uint64_t key = mix_key(seed, static_cast<std::uint64_t>(m));
  key = mix_key(key, static_cast<std::uint64_t>(n));
  key = mix_key(key, static_cast<std::uint64_t>(i));
  return mix_key(key, static_cast<std::uint64_t>(a));
}

void check_config(const LearnerConfig& config) {
  if (!(config.epsilon > 0.0))
    throw std::invalid_argument("epsilon must be positive");
  if (config.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be >= 1");
  if (config.schedule.block_length < 1)
    throw std::invalid_argument("block_length must be >= 1");
  if (config.trace_stride < 1)
    throw std::invalid_argument("trace_stride must be >= 1");
}

// Jacobi sweep writing into out; reads only from q.
void sweep_into(const QTable& q, QTable& out, const FiniteHorizonMdp& mdp,
                const TransitionSampler& sampler, long m,
                const LearnerConfig& config,
                std::vector<double>& next_value) {
  int N = mdp.horizon();
  int S = mdp.num_states();
  double alpha = step_size(m, config.schedule);
  for (int i = 0; i < S; ++i)
    for (int a : mdp.feasible_actions(i)) out.at(N, i, a) = mdp.terminal_cost(i);
  for (int n = N - 1; n >= 0; --n) {
    for (int j = 0; j < S; ++j)
      next_value[static_cast<std::size_t>(j)] =
          min_over_actions(mdp, q, n + 1, j);
    for (int i = 0; i < S; ++i) {
      for (int a : mdp.feasible_actions(i)) {
        SplitMix64 stream(update_key(config.seed, m, n, i, a));
        int j = sampler.sample(n, i, a, stream);
        out.at(n, i, a) =
            q_update(q.at(n, i, a), next_value[static_cast<std::size_t>(j)],
                     mdp.stage_cost(n, i, a, j), alpha);
      }
    }
  }
}

}  // namespace

double step_size(long m, const StepSchedule& schedule) {
  assert(m >= 0);
  assert(schedule.block_length >= 1);
  long block = m / schedule.block_length + 1;  // ceil((m+1) / L)
  return 1.0 / static_cast<double>(block);
}

TransitionSampler::TransitionSampler(const FiniteHorizonMdp& mdp)
    : stationary_(mdp.is_stationary()),
      num_states_(mdp.num_states()),
      num_actions_(mdp.num_actions()) {
  int stages = stationary_ ? 1 : mdp.horizon();
  std::size_t rows = static_cast<std::size_t>(stages) * num_states_ *
                     num_actions_;
  cumulative_.assign(rows * num_states_, 0.0);
  last_support_.assign(rows, num_states_ - 1);
  for (int n = 0; n < stages; ++n) {
    for (int i = 0; i < num_states_; ++i) {
      for (int a = 0; a < num_actions_; ++a) {
        std::size_t row = row_index(n, i, a);
        double* c = cumulative_.data() + row * num_states_;
        double acc = 0.0;
        for (int j = 0; j < num_states_; ++j) {
          double p = mdp.transition(n, i, a, j);
          acc += p;
          c[j] = acc;
          if (p > 0.0) last_support_[row] = j;
        }
      }
    }
  }
}

QTable sweep(const QTable& q, const FiniteHorizonMdp& mdp, long m,
             const LearnerConfig& config) {
  if (!q.shaped_for(mdp)) throw std::invalid_argument("q not shaped for mdp");
  if (m < 0) throw std::invalid_argument("iteration counter must be >= 0");
  if (config.update_mode != UpdateMode::synchronous)
    throw std::invalid_argument("sweep requires synchronous update mode");
  check_config(config);
  TransitionSampler sampler(mdp);
  QTable out = zeros_like(mdp);
  std::vector<double> next_value(static_cast<std::size_t>(mdp.num_states()));
  sweep_into(q, out, mdp, sampler, m, config, next_value);
  return out;
}

RunResult run(const FiniteHorizonMdp& mdp, const LearnerConfig& config,
              const QTable* oracle) {
  check_config(config);
  {
    std::vector<std::string> violations = validate(mdp);
    if (!violations.empty())
      throw std::invalid_argument("invalid mdp: " + violations.front());
  }
  if (oracle != nullptr && !oracle->shaped_for(mdp))
    throw std::invalid_argument("oracle not shaped for mdp");

  int N = mdp.horizon();
  int S = mdp.num_states();
  TransitionSampler sampler(mdp);
  RunResult result{initial_q(mdp), {}, 0, false};
  QTable& q = result.q;

  auto record = [&](long iteration, double delta, double alpha) {
    bool due = (iteration % config.trace_stride == 0) ||
               (delta <= config.epsilon) || (iteration == config.max_iterations);
    if (!due) return;
    TraceRecord rec;
    rec.iteration = iteration;
    rec.delta = delta;
    if (oracle != nullptr) rec.error = sup_error(q, *oracle);
    rec.step_size = alpha;
    result.trace.records.push_back(rec);
  };

  if (config.update_mode == UpdateMode::synchronous) {
    QTable next = zeros_like(mdp);
    std::vector<double> next_value(static_cast<std::size_t>(S));
    for (long m = 0; m < config.max_iterations; ++m) {
      sweep_into(q, next, mdp, sampler, m, config, next_value);
      double delta = sup_diff(q, next);
      std::swap(q.values(), next.values());
      result.iterations = m + 1;
      record(result.iterations, delta, step_size(m, config.schedule));
      if (delta <= config.epsilon) {
        result.converged = true;
        break;
      }
    }
    return result;
  }

  // single_sample mode: uniformly chosen entry, in-place reads, per-pair
  // step size counters.
  std::vector<std::tuple<int, int, int>> pairs;
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < S; ++i)
      for (int a : mdp.feasible_actions(i)) pairs.emplace_back(n, i, a);
  std::vector<long> counters(pairs.size(), 0);
  Rng picker(mix_key(config.seed, kSingleSampleTag));
  for (long m = 0; m < config.max_iterations; ++m) {
    std::size_t k =
        static_cast<std::size_t>(picker.next_int(static_cast<int>(pairs.size())));
    auto [n, i, a] = pairs[k];
    double alpha = step_size(counters[k]++, config.schedule);
    int j = sampler.sample(n, i, a, picker);
    double target_min = min_over_actions(mdp, q, n + 1, j);
    double old_value = q.at(n, i, a);
    double new_value =
        q_update(old_value, target_min, mdp.stage_cost(n, i, a, j), alpha);
    q.at(n, i, a) = new_value;
    double delta = std::abs(new_value - old_value);
    result.iterations = m + 1;
    record(result.iterations, delta, alpha);
    if (delta <= config.epsilon) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double sup_error(const QTable& q, const QTable& q_ref) {
  return sup_diff(q, q_ref);
}

void write_trace_csv(const TrainingTrace& trace, std::ostream& out) {
  out << "iteration,delta,error,step_size\n";
  for (const TraceRecord& rec : trace.records) {
    out << rec.iteration << ',' << format_double(rec.delta) << ',';
    if (rec.error.has_value()) out << format_double(*rec.error);
    out << ',' << format_double(rec.step_size) << '\n';
  }
}

}  // namespace fhmdp::fhql
