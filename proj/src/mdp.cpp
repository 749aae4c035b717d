#include "fhmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace fhmdp {

namespace {

std::string format_tuple(int n, int i, int a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(n=%d,i=%d,a=%d)", n, i, a);
  return buf;
}

}  // namespace

FiniteHorizonMdp::FiniteHorizonMdp(int horizon, int num_states, int num_actions,
                                   std::vector<std::vector<int>> feasible_actions,
                                   std::vector<double> transition,
                                   std::vector<double> stage_cost,
                                   std::vector<double> terminal_cost) {
  horizon_ = horizon;
  num_states_ = num_states;
  num_actions_ = num_actions;
  stage_stride_ = static_cast<std::size_t>(num_states) * num_actions * num_states;
  feasible_ = std::move(feasible_actions);
  transition_ = std::move(transition);
  stage_cost_ = std::move(stage_cost);
  terminal_cost_ = std::move(terminal_cost);
  check_shapes(static_cast<std::size_t>(horizon_) * stage_stride_);
}

FiniteHorizonMdp FiniteHorizonMdp::stationary(
    int horizon, int num_states, int num_actions,
    std::vector<std::vector<int>> feasible_actions,
    std::vector<double> transition, std::vector<double> stage_cost,
    std::vector<double> terminal_cost) {
  FiniteHorizonMdp mdp;
  mdp.horizon_ = horizon;
  mdp.num_states_ = num_states;
  mdp.num_actions_ = num_actions;
  mdp.stage_stride_ = 0;
  mdp.feasible_ = std::move(feasible_actions);
  mdp.transition_ = std::move(transition);
  mdp.stage_cost_ = std::move(stage_cost);
  mdp.terminal_cost_ = std::move(terminal_cost);
  mdp.check_shapes(static_cast<std::size_t>(num_states) * num_actions *
                   num_states);
  return mdp;
}

void FiniteHorizonMdp::check_shapes(std::size_t expected_table_size) const {
  if (horizon_ < 1) throw std::invalid_argument("horizon must be >= 1");
  if (num_states_ < 1) throw std::invalid_argument("num_states must be >= 1");
  if (num_actions_ < 1) throw std::invalid_argument("num_actions must be >= 1");
  if (feasible_.size() != static_cast<std::size_t>(num_states_))
    throw std::invalid_argument("feasible_actions must have one set per state");
  for (const std::vector<int>& actions : feasible_) {
    for (int a : actions) {
      if (a < 0 || a >= num_actions_)
        throw std::invalid_argument("feasible action index out of range");
    }
    if (!std::is_sorted(actions.begin(), actions.end()) ||
        std::adjacent_find(actions.begin(), actions.end()) != actions.end())
      throw std::invalid_argument("feasible actions must be sorted and unique");
  }
  if (transition_.size() != expected_table_size)
    throw std::invalid_argument("transition table has wrong size");
  if (stage_cost_.size() != expected_table_size)
    throw std::invalid_argument("stage cost table has wrong size");
  if (terminal_cost_.size() != static_cast<std::size_t>(num_states_))
    throw std::invalid_argument("terminal cost must have one entry per state");
}

double FiniteHorizonMdp::max_abs_stage_cost() const {
  double worst = 0.0;
  for (double g : stage_cost_) worst = std::max(worst, std::abs(g));
  return worst;
}

double FiniteHorizonMdp::max_abs_terminal_cost() const {
  double worst = 0.0;
  for (double g : terminal_cost_) worst = std::max(worst, std::abs(g));
  return worst;
}

std::vector<std::string> validate(const FiniteHorizonMdp& mdp) {
  std::vector<std::string> violations;
  char buf[160];
  for (int i = 0; i < mdp.num_states(); ++i) {
    if (mdp.feasible_actions(i).empty()) {
      std::snprintf(buf, sizeof(buf), "feasible action set empty for state %d",
                    i);
      violations.emplace_back(buf);
    }
  }
  for (int n = 0; n < mdp.horizon(); ++n) {
    for (int i = 0; i < mdp.num_states(); ++i) {
      for (int a : mdp.feasible_actions(i)) {
        double sum = 0.0;
        bool row_ok = true;
        for (int j = 0; j < mdp.num_states(); ++j) {
          double p = mdp.transition(n, i, a, j);
          if (!std::isfinite(p) || p < 0.0) {
            std::snprintf(buf, sizeof(buf),
                          "bad transition probability %g at %s j=%d", p,
                          format_tuple(n, i, a).c_str(), j);
            violations.emplace_back(buf);
            row_ok = false;
          }
          sum += p;
          double g = mdp.stage_cost(n, i, a, j);
          if (!std::isfinite(g)) {
            std::snprintf(buf, sizeof(buf), "non-finite stage cost at %s j=%d",
                          format_tuple(n, i, a).c_str(), j);
            violations.emplace_back(buf);
          }
        }
        if (row_ok && std::abs(sum - 1.0) > kRowSumTolerance) {
          std::snprintf(buf, sizeof(buf), "transition row %s sums to %.12g",
                        format_tuple(n, i, a).c_str(), sum);
          violations.emplace_back(buf);
        }
      }
    }
  }
  for (int i = 0; i < mdp.num_states(); ++i) {
    if (!std::isfinite(mdp.terminal_cost(i))) {
      std::snprintf(buf, sizeof(buf), "non-finite terminal cost at state %d",
                    i);
      violations.emplace_back(buf);
    }
  }
  return violations;
}

bool is_valid(const FiniteHorizonMdp& mdp) { return validate(mdp).empty(); }

QTable zeros_like(const FiniteHorizonMdp& mdp) {
  return QTable(mdp.horizon() + 1, mdp.num_states(), mdp.num_actions());
}

QTable initial_q(const FiniteHorizonMdp& mdp) {
  QTable q = zeros_like(mdp);
  int N = mdp.horizon();
  for (int i = 0; i < mdp.num_states(); ++i)
    for (int a : mdp.feasible_actions(i)) q.at(N, i, a) = mdp.terminal_cost(i);
  return q;
}

double sup_norm(const QTable& q) {
  double worst = 0.0;
  for (double v : q.values()) worst = std::max(worst, std::abs(v));
  return worst;
}

double sup_diff(const QTable& a, const QTable& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("table shapes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k)
    worst = std::max(worst, std::abs(a.values()[k] - b.values()[k]));
  return worst;
}

NonstationaryPolicy greedy_policy(const FiniteHorizonMdp& mdp,
                                  const QTable& q) {
  if (!q.shaped_for(mdp)) throw std::invalid_argument("q not shaped for mdp");
  NonstationaryPolicy pi(mdp.horizon(), mdp.num_states());
  for (int n = 0; n < mdp.horizon(); ++n) {
    for (int i = 0; i < mdp.num_states(); ++i) {
      const std::vector<int>& actions = mdp.feasible_actions(i);
      if (actions.empty())
        throw std::invalid_argument("empty feasible action set");
      int best = actions[0];
      double best_value = q.at(n, i, best);
      for (std::size_t k = 1; k < actions.size(); ++k) {
        double v = q.at(n, i, actions[k]);
        if (v < best_value) {
          best_value = v;
          best = actions[k];
        }
      }
      pi.action(n, i) = best;
    }
  }
  return pi;
}

StageValueFunction q_to_value(const FiniteHorizonMdp& mdp, const QTable& q) {
  if (!q.shaped_for(mdp)) throw std::invalid_argument("q not shaped for mdp");
  StageValueFunction values(mdp.horizon() + 1, mdp.num_states());
  for (int n = 0; n <= mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      values.at(n, i) = min_over_actions(mdp, q, n, i);
  return values;
}

QTable policy_q_evaluation(const FiniteHorizonMdp& mdp,
                           const NonstationaryPolicy& pi) {
  int N = mdp.horizon();
  int S = mdp.num_states();
  if (pi.num_stages() != N || pi.num_states() != S)
    throw std::invalid_argument("policy not shaped for mdp");
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < S; ++i) {
      const std::vector<int>& actions = mdp.feasible_actions(i);
      if (!std::binary_search(actions.begin(), actions.end(), pi.action(n, i)))
        throw std::invalid_argument("policy picks infeasible action at " +
                                    format_tuple(n, i, pi.action(n, i)));
    }
  }
  QTable q = zeros_like(mdp);
  // continuation[j] = expected cost from stage n+1 in state j under pi.
  std::vector<double> continuation(static_cast<std::size_t>(S));
  for (int j = 0; j < S; ++j) {
    continuation[static_cast<std::size_t>(j)] = mdp.terminal_cost(j);
    for (int a : mdp.feasible_actions(j)) q.at(N, j, a) = mdp.terminal_cost(j);
  }
  for (int n = N - 1; n >= 0; --n) {
    std::vector<double> next(static_cast<std::size_t>(S));
    for (int i = 0; i < S; ++i) {
      for (int a : mdp.feasible_actions(i)) {
        double value = 0.0;
        for (int j = 0; j < S; ++j)
          value += mdp.transition(n, i, a, j) *
                   (mdp.stage_cost(n, i, a, j) +
                    continuation[static_cast<std::size_t>(j)]);
        q.at(n, i, a) = value;
      }
      next[static_cast<std::size_t>(i)] = q.at(n, i, pi.action(n, i));
    }
    continuation = std::move(next);
  }
  return q;
}

double policy_space_size(const FiniteHorizonMdp& mdp) {
  double count = 1.0;
  for (int n = 0; n < mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      count *= static_cast<double>(mdp.feasible_actions(i).size());
  return count;
}

QTable brute_force_optimal_q(const FiniteHorizonMdp& mdp) {
  if (policy_space_size(mdp) > kPolicyEnumerationGuard)
    throw std::invalid_argument("policy space exceeds enumeration guard");
  int N = mdp.horizon();
  int S = mdp.num_states();
  for (int i = 0; i < S; ++i)
    if (mdp.feasible_actions(i).empty())
      throw std::invalid_argument("empty feasible action set");

  QTable best = zeros_like(mdp);
  for (std::size_t k = 0; k < best.values().size(); ++k)
    best.values()[k] = std::numeric_limits<double>::infinity();
  for (int i = 0; i < S; ++i)
    for (int a : mdp.feasible_actions(i)) best.at(N, i, a) = mdp.terminal_cost(i);

  // Odometer over one feasible-action choice per (n, i) slot.
  std::size_t slots = static_cast<std::size_t>(N) * S;
  std::vector<std::size_t> choice(slots, 0);
  std::vector<double> continuation(static_cast<std::size_t>(S));
  std::vector<double> next(static_cast<std::size_t>(S));
  for (;;) {
    // Evaluate the current policy backward, folding its Q-values into best.
    for (int j = 0; j < S; ++j)
      continuation[static_cast<std::size_t>(j)] = mdp.terminal_cost(j);
    for (int n = N - 1; n >= 0; --n) {
      for (int i = 0; i < S; ++i) {
        const std::vector<int>& actions = mdp.feasible_actions(i);
        std::size_t slot = static_cast<std::size_t>(n) * S + i;
        int chosen = actions[choice[slot]];
        for (int a : actions) {
          double value = 0.0;
          for (int j = 0; j < S; ++j)
            value += mdp.transition(n, i, a, j) *
                     (mdp.stage_cost(n, i, a, j) +
                      continuation[static_cast<std::size_t>(j)]);
          if (value < best.at(n, i, a)) best.at(n, i, a) = value;
          if (a == chosen) next[static_cast<std::size_t>(i)] = value;
        }
      }
      std::swap(continuation, next);
    }
    // Advance the odometer.
    std::size_t slot = 0;
    for (; slot < slots; ++slot) {
      int state = static_cast<int>(slot % S);
      if (++choice[slot] < mdp.feasible_actions(state).size()) break;
      choice[slot] = 0;
    }
    if (slot == slots) break;
  }
  return best;
}

}  // namespace fhmdp
