#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "fhmdp/mdp.hpp"
#include "fhmdp/rng.hpp"

namespace fhmdp::fhql {

// Step size schedule a(m) = 1 / ceil((m+1) / block_length): constant within
// blocks, harmonic across them. Positive and nonincreasing, with divergent
// sum and convergent sum of squares (block_length * pi^2 / 6).
struct StepSchedule {
  int block_length = 10;
};

// a(m) for iteration counter m >= 0.
double step_size(long m, const StepSchedule& schedule);

enum class UpdateMode {
  // Every feasible (n, i, a) with n < N updated once per iteration, all
  // reads against the previous iterate.
  synchronous,
  // One uniformly chosen feasible (n, i, a) per iteration, in-place reads,
  // a per-pair counter driving the step size. For experimentation; the
  // per-iteration delta is a single entry's change, so termination by
  // epsilon fires much earlier than in synchronous mode.
  single_sample,
};

struct LearnerConfig {
  double epsilon = 0.05;
  long max_iterations = 200000;
  StepSchedule schedule;
  std::uint64_t seed = 1;
  long trace_stride = 1;
  UpdateMode update_mode = UpdateMode::synchronous;
};

struct TraceRecord {
  long iteration = 0;           // iterations applied so far
  double delta = 0.0;           // sup norm of the last iterate change
  std::optional<double> error;  // sup distance to the oracle, when supplied
  double step_size = 0.0;       // a(m) used by the last update
};

struct TrainingTrace {
  std::vector<TraceRecord> records;
};

struct RunResult {
  QTable q;
  TrainingTrace trace;
  long iterations = 0;
  bool converged = false;
};

// Inverse-CDF draw of j ~ p_n(i,a,.): walks the cumulative row and consumes
// exactly one value from rng. Should the uniform land beyond the accumulated
// mass (row sums are 1 only up to rounding), the last state with positive
// probability is returned.
template <class RngT>
int sample_next_state(const FiniteHorizonMdp& mdp, int n, int i, int a,
                      RngT& rng) {
  double u = rng.next_unit();
  int S = mdp.num_states();
  double acc = 0.0;
  for (int j = 0; j < S; ++j) {
    acc += mdp.transition(n, i, a, j);
    if (u < acc) return j;
  }
  for (int j = S - 1; j >= 0; --j)
    if (mdp.transition(n, i, a, j) > 0.0) return j;
  return S - 1;
}

// Precomputed cumulative kernel rows for repeated sampling. Draws agree
// bit-for-bit with sample_next_state given the same uniform, because the
// partial sums are accumulated in the same order.
class TransitionSampler {
 public:
  explicit TransitionSampler(const FiniteHorizonMdp& mdp);

  template <class RngT>
  int sample(int n, int i, int a, RngT& rng) const {
    double u = rng.next_unit();
    std::size_t row = row_index(n, i, a);
    const double* c = cumulative_.data() + row * num_states_;
    int lo = 0;
    int hi = num_states_;  // first j with c[j] > u, or S if none
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (c[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    if (lo < num_states_) return lo;
    return last_support_[row];
  }

 private:
  std::size_t row_index(int n, int i, int a) const {
    std::size_t stage = stationary_ ? 0 : static_cast<std::size_t>(n);
    return (stage * num_states_ + static_cast<std::size_t>(i)) * num_actions_ +
           static_cast<std::size_t>(a);
  }

  bool stationary_;
  int num_states_;
  int num_actions_;
  std::vector<double> cumulative_;
  std::vector<int> last_support_;
};

// Relaxed move of one entry toward the sampled target:
//   (1 - alpha) * q_value + alpha * (sampled_cost + next_state_min),
// where next_state_min = min over A(j) of Q_{n+1}(j, .) at the sampled j.
inline double q_update(double q_value, double next_state_min,
                       double sampled_cost, double alpha) {
  return (1.0 - alpha) * q_value + alpha * (sampled_cost + next_state_min);
}

// One synchronous iteration with step size a(m): every feasible (n, i, a)
// with n < N moves toward an independently sampled target, every read seeing
// the input table, and the terminal layer is rewritten to the terminal cost.
// The sample for (n, i, a) comes from a substream keyed by
// (config.seed, m, n, i, a), so update order cannot matter.
QTable sweep(const QTable& q, const FiniteHorizonMdp& mdp, long m,
             const LearnerConfig& config);

// Full training loop from the standard initialization (zeros, terminal layer
// pinned). Stops once the sup-norm change of an iteration is <= epsilon
// (checked every iteration) or after max_iterations. When an oracle table is
// supplied, traced records carry the sup distance to it. Trace records are
// emitted every trace_stride iterations and at the final iteration.
RunResult run(const FiniteHorizonMdp& mdp, const LearnerConfig& config,
              const QTable* oracle = nullptr);

// Sup distance between a learned table and a reference. Shapes must match.
double sup_error(const QTable& q, const QTable& q_ref);

// Columns iteration,delta,error,step_size; error is left empty for records
// without an oracle.
void write_trace_csv(const TrainingTrace& trace, std::ostream& out);

}  // namespace fhmdp::fhql
