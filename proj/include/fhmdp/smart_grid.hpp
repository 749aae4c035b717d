#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fhmdp/mdp.hpp"
#include "fhmdp/rng.hpp"

namespace fhmdp::grid {

// Cap on compiled state spaces (d_max+1)(b_max+1)(p_max+1).
inline constexpr int kMaxCompiledStates = 100000;

// Consumer with a battery facing a random demand and a random price.
//
// State (d, b, p): demand level, battery charge, unit price, each on an
// integer range. Action (u1, u2): units purchased from the grid and units
// drawn from the battery, with 0 <= u1 <= u1_max, 0 <= u2 <= min(b, d).
// Stage cost c (d - u2) + p u1. Battery update, in order: add u1, subtract
// u2, add the renewable arrival r, cap at b_max, floor at 0. Demand and
// price evolve by Markov chains independent of actions; r is drawn i.i.d.,
// and is 0 whenever renewables are disabled. Terminal cost is zero.
struct GridConfig {
  int d_max = 0;
  int b_max = 0;
  int p_max = 0;
  int r_max = 0;
  int u1_max = 0;
  double c = 1.0;
  int horizon = 1;
  std::vector<std::vector<double>> demand_chain;  // (d_max+1)^2 row stochastic
  std::vector<std::vector<double>> price_chain;   // (p_max+1)^2 row stochastic
  std::vector<double> renewable_dist;             // over 0..r_max
  bool renewables_enabled = false;
  std::uint64_t seed = 1;
};

struct GridState {
  int d = 0;
  int b = 0;
  int p = 0;
};

struct GridAction {
  int u1 = 0;
  int u2 = 0;
};

// Lazy reflecting random walk on {0..num_levels-1}: stay with probability
// 0.5, step +-1 with probability 0.25 each, steps beyond the range collapse
// onto the boundary.
std::vector<std::vector<double>> lazy_random_walk_chain(int num_levels);

// Scenario constructor: ranges d_max/b_max/p_max, lazy random walks for
// demand and price, uniform renewables on 0..d_max, u1_max = d_max + b_max,
// unit shortfall cost.
GridConfig default_config(int horizon, int d_max, int b_max, int p_max,
                          bool renewables_enabled);

// Structural checks (chain shapes, row sums, ranges); empty iff usable.
std::vector<std::string> validate(const GridConfig& config);

// All (u1, u2) with u1 <= u1_max and u2 <= min(b, d), in action-index order.
std::vector<GridAction> feasible_actions(const GridConfig& config,
                                         const GridState& state);

double stage_cost(const GridConfig& config, const GridState& state,
                  const GridAction& action);

// One sampled step: draws d', p', then r (zero when renewables are
// disabled) and applies the battery update.
GridState transition(const GridConfig& config, const GridState& state,
                     const GridAction& action, Rng& rng);

// Enumeration of the compiled state space, demand-major then battery then
// price, and of the global action space, u1-major.
int num_states(const GridConfig& config);
int state_index(const GridConfig& config, const GridState& state);
GridState state_at(const GridConfig& config, int index);
int num_actions(const GridConfig& config);
int action_index(const GridConfig& config, const GridAction& action);
GridAction action_at(const GridConfig& config, int index);

// Exact compilation by marginalizing the renewable arrival into the battery
// component: a stage-invariant MDP over the enumerated state space with zero
// terminal cost. Throws std::invalid_argument if the config fails validation
// or the state space exceeds kMaxCompiledStates.
FiniteHorizonMdp to_mdp(const GridConfig& config);

// Buy exactly the shortfall (clamped to u1_max), spend min(d, b).
GridAction fill_demand_policy(const GridConfig& config, const GridState& state);

// Buy demand plus remaining battery headroom (clamped to u1_max), spend
// min(d, b).
GridAction fill_battery_policy(const GridConfig& config,
                               const GridState& state);

using PolicyFn = std::function<GridAction(int stage, const GridState&)>;

// Greedy stage-indexed policy over compiled state indices, for simulating a
// trained table against the live dynamics.
PolicyFn policy_from_table(const GridConfig& config, NonstationaryPolicy pi);

struct EvaluationResult {
  double mean_cost = 0.0;  // per-stage average across episodes
  double std_err = 0.0;    // standard error of the per-episode mean
  long episodes = 0;
};

// Monte Carlo policy evaluation on the live dynamics: each episode starts
// from a uniformly drawn state and runs the full horizon on its own
// substream of rng, so episode counts can change without reshuffling
// earlier episodes.
EvaluationResult evaluate_average_cost(const GridConfig& config,
                                       const PolicyFn& policy, long episodes,
                                       Rng& rng);

}  // namespace fhmdp::grid
