#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

namespace fhmdp {

// Row-sum tolerance for transition kernel validation.
inline constexpr double kRowSumTolerance = 1e-9;

// Cap on the number of deterministic policies brute_force_optimal_q will
// enumerate.
inline constexpr double kPolicyEnumerationGuard = 1e7;

// Finite horizon MDP with stage-dependent kernels and costs, under cost
// minimization.
//
// Stages n = 0..N-1 are decision stages; N is the terminal instant.
// transition(n,i,a,j) and stage_cost(n,i,a,j) are dense over the full action
// range 0..num_actions-1; entries with a outside feasible_actions(i) are
// never read by any algorithm. Feasible action sets do not vary with the
// stage. Instances are immutable after construction and safe to share across
// threads.
class FiniteHorizonMdp {
 public:
  // Stage-dependent data. transition and stage_cost are flattened [n][i][a][j]
  // with sizes N*S*A*S; terminal_cost has one entry per state. Throws
  // std::invalid_argument on shape mismatches or out-of-range action indices;
  // semantic checks (row sums, empty action sets, non-finite values) are the
  // job of validate().
  FiniteHorizonMdp(int horizon, int num_states, int num_actions,
                   std::vector<std::vector<int>> feasible_actions,
                   std::vector<double> transition,
                   std::vector<double> stage_cost,
                   std::vector<double> terminal_cost);

  // Stage-invariant data: one [i][a][j] table of size S*A*S shared by every
  // decision stage. Accessors behave exactly as if the table were replicated.
  static FiniteHorizonMdp stationary(int horizon, int num_states,
                                     int num_actions,
                                     std::vector<std::vector<int>> feasible_actions,
                                     std::vector<double> transition,
                                     std::vector<double> stage_cost,
                                     std::vector<double> terminal_cost);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  bool is_stationary() const { return stage_stride_ == 0; }

  // Feasible actions for state i, sorted ascending.
  const std::vector<int>& feasible_actions(int i) const {
    return feasible_[static_cast<std::size_t>(i)];
  }

  double transition(int n, int i, int a, int j) const {
    return transition_[index(n, i, a, j)];
  }
  double stage_cost(int n, int i, int a, int j) const {
    return stage_cost_[index(n, i, a, j)];
  }
  double terminal_cost(int i) const {
    return terminal_cost_[static_cast<std::size_t>(i)];
  }

  // Largest |g_n(i,a,j)| over decision stages and |g_N(i)| respectively.
  // Dense infeasible entries are included; generators keep them zero.
  double max_abs_stage_cost() const;
  double max_abs_terminal_cost() const;

  std::size_t index(int n, int i, int a, int j) const {
    assert(n >= 0 && n < horizon_);
    assert(i >= 0 && i < num_states_);
    assert(a >= 0 && a < num_actions_);
    assert(j >= 0 && j < num_states_);
    return static_cast<std::size_t>(n) * stage_stride_ +
           (static_cast<std::size_t>(i) * num_actions_ +
            static_cast<std::size_t>(a)) *
               num_states_ +
           static_cast<std::size_t>(j);
  }

 private:
  FiniteHorizonMdp() = default;

  void check_shapes(std::size_t expected_table_size) const;

  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::size_t stage_stride_ = 0;  // 0 when stage-invariant
  std::vector<std::vector<int>> feasible_;
  std::vector<double> transition_;
  std::vector<double> stage_cost_;
  std::vector<double> terminal_cost_;
};

// Dense table over (n, i, a) with n = 0..num_stages-1. Q tables use
// num_stages = N + 1, with the layer n = N pinned to the terminal cost on
// feasible actions. Entries with a infeasible in i are kept at zero by every
// routine in this library, so whole-tensor norms only see feasible content.
class QTable {
 public:
  QTable(int num_stages, int num_states, int num_actions)
      : num_stages_(num_stages),
        num_states_(num_states),
        num_actions_(num_actions),
        values_(static_cast<std::size_t>(num_stages) * num_states * num_actions,
                0.0) {}

  int num_stages() const { return num_stages_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double at(int n, int i, int a) const { return values_[index(n, i, a)]; }
  double& at(int n, int i, int a) { return values_[index(n, i, a)]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool same_shape(const QTable& other) const {
    return num_stages_ == other.num_stages_ &&
           num_states_ == other.num_states_ &&
           num_actions_ == other.num_actions_;
  }

  bool shaped_for(const FiniteHorizonMdp& mdp) const {
    return num_stages_ == mdp.horizon() + 1 &&
           num_states_ == mdp.num_states() &&
           num_actions_ == mdp.num_actions();
  }

  std::size_t index(int n, int i, int a) const {
    assert(n >= 0 && n < num_stages_);
    assert(i >= 0 && i < num_states_);
    assert(a >= 0 && a < num_actions_);
    return (static_cast<std::size_t>(n) * num_states_ +
            static_cast<std::size_t>(i)) *
               num_actions_ +
           static_cast<std::size_t>(a);
  }

 private:
  int num_stages_;
  int num_states_;
  int num_actions_;
  std::vector<double> values_;
};

// Stage-indexed deterministic policy: one action per (n, i), n = 0..N-1.
class NonstationaryPolicy {
 public:
  NonstationaryPolicy(int num_stages, int num_states)
      : num_stages_(num_stages),
        num_states_(num_states),
        actions_(static_cast<std::size_t>(num_stages) * num_states, 0) {}

  int num_stages() const { return num_stages_; }
  int num_states() const { return num_states_; }

  int action(int n, int i) const { return actions_[index(n, i)]; }
  int& action(int n, int i) { return actions_[index(n, i)]; }

 private:
  std::size_t index(int n, int i) const {
    assert(n >= 0 && n < num_stages_);
    assert(i >= 0 && i < num_states_);
    return static_cast<std::size_t>(n) * num_states_ +
           static_cast<std::size_t>(i);
  }

  int num_stages_;
  int num_states_;
  std::vector<int> actions_;
};

// Stage-indexed value function over (n, i), n = 0..N.
class StageValueFunction {
 public:
  StageValueFunction(int num_stages, int num_states)
      : num_stages_(num_stages),
        num_states_(num_states),
        values_(static_cast<std::size_t>(num_stages) * num_states, 0.0) {}

  int num_stages() const { return num_stages_; }
  int num_states() const { return num_states_; }

  double at(int n, int i) const { return values_[index(n, i)]; }
  double& at(int n, int i) { return values_[index(n, i)]; }

 private:
  std::size_t index(int n, int i) const {
    assert(n >= 0 && n < num_stages_);
    assert(i >= 0 && i < num_states_);
    return static_cast<std::size_t>(n) * num_states_ +
           static_cast<std::size_t>(i);
  }

  int num_stages_;
  int num_states_;
  std::vector<double> values_;
};

// Semantic checks: every feasible kernel row sums to 1 within
// kRowSumTolerance with non-negative entries, every A(i) is nonempty, every
// cost is finite. Returns one message per violation; empty iff valid.
std::vector<std::string> validate(const FiniteHorizonMdp& mdp);

bool is_valid(const FiniteHorizonMdp& mdp);

// All-zero table shaped (N+1, S, A).
QTable zeros_like(const FiniteHorizonMdp& mdp);

// Zero table with the terminal layer pinned to the terminal cost on feasible
// actions: the standard learner initialization.
QTable initial_q(const FiniteHorizonMdp& mdp);

// min over b in A(j) of q(n, j, b). A(j) must be nonempty.
inline double min_over_actions(const FiniteHorizonMdp& mdp, const QTable& q,
                               int n, int j) {
  const std::vector<int>& actions = mdp.feasible_actions(j);
  assert(!actions.empty());
  double best = q.at(n, j, actions[0]);
  for (std::size_t k = 1; k < actions.size(); ++k) {
    double v = q.at(n, j, actions[k]);
    if (v < best) best = v;
  }
  return best;
}

// Sup norm over the whole tensor. Infeasible entries are zero by convention,
// so this equals the sup over feasible entries for tables produced here.
double sup_norm(const QTable& q);

// Sup norm of a - b. Shapes must match.
double sup_diff(const QTable& a, const QTable& b);

// Per-stage argmin of q over A(i); ties broken toward the lowest action
// index. Covers decision stages 0..N-1.
NonstationaryPolicy greedy_policy(const FiniteHorizonMdp& mdp,
                                  const QTable& q);

// J_n(i) = min over A(i) of Q_n(i, a), for n = 0..N.
StageValueFunction q_to_value(const FiniteHorizonMdp& mdp, const QTable& q);

// Q-values of following pi: entry (n, i, a) is the expected cost of playing
// a at stage n in state i and following pi from stage n+1 on. The terminal
// layer equals the terminal cost. Throws std::invalid_argument if pi picks
// an infeasible action.
QTable policy_q_evaluation(const FiniteHorizonMdp& mdp,
                           const NonstationaryPolicy& pi);

// Number of deterministic nonstationary policies, as a double to avoid
// overflow on large instances.
double policy_space_size(const FiniteHorizonMdp& mdp);

// Entrywise min of policy_q_evaluation over every deterministic policy.
// Exponential; guarded by kPolicyEnumerationGuard. Intended as an
// independent oracle for small instances.
QTable brute_force_optimal_q(const FiniteHorizonMdp& mdp);

}  // namespace fhmdp
