#include "fhmdp/smart_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fhmdp::grid {

namespace {

int clamp_int(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

// Battery update in fixed order: add purchase, subtract spend, add
// renewable, cap, floor.
int next_battery(const GridConfig& config, int b, const GridAction& action,
                 int r) {
  int level = b + action.u1 - action.u2 + r;
  level = std::min(level, config.b_max);
  level = std::max(level, 0);
  return level;
}

int u2_cap(const GridConfig& config) {
  return std::min(config.b_max, config.d_max);
}

int sample_level(const std::vector<double>& dist, Rng& rng) {
  double u = rng.next_unit();
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    acc += dist[k];
    if (u < acc) return static_cast<int>(k);
  }
  for (std::size_t k = dist.size(); k-- > 0;)
    if (dist[k] > 0.0) return static_cast<int>(k);
  return static_cast<int>(dist.size()) - 1;
}

void check_chain(const std::vector<std::vector<double>>& chain, int levels,
                 const char* name, std::vector<std::string>& violations) {
  char buf[128];
  if (chain.size() != static_cast<std::size_t>(levels)) {
    std::snprintf(buf, sizeof(buf), "%s must have %d rows", name, levels);
    violations.emplace_back(buf);
    return;
  }
  for (int x = 0; x < levels; ++x) {
    const std::vector<double>& row = chain[static_cast<std::size_t>(x)];
    if (row.size() != static_cast<std::size_t>(levels)) {
      std::snprintf(buf, sizeof(buf), "%s row %d must have %d entries", name,
                    x, levels);
      violations.emplace_back(buf);
      continue;
    }
    double sum = 0.0;
    bool ok = true;
    for (double p : row) {
      if (!std::isfinite(p) || p < 0.0) {
        std::snprintf(buf, sizeof(buf), "%s row %d has bad entry %g", name, x,
                      p);
        violations.emplace_back(buf);
        ok = false;
      }
      sum += p;
    }
    if (ok && std::abs(sum - 1.0) > kRowSumTolerance) {
      std::snprintf(buf, sizeof(buf), "%s row %d sums to %.12g", name, x, sum);
      violations.emplace_back(buf);
    }
  }
}

}  // namespace

std::vector<std::vector<double>> lazy_random_walk_chain(int num_levels) {
  if (num_levels < 1) throw std::invalid_argument("num_levels must be >= 1");
  std::vector<std::vector<double>> chain(
      static_cast<std::size_t>(num_levels),
      std::vector<double>(static_cast<std::size_t>(num_levels), 0.0));
  for (int x = 0; x < num_levels; ++x) {
    chain[x][clamp_int(x - 1, 0, num_levels - 1)] += 0.25;
    chain[x][x] += 0.5;
    chain[x][clamp_int(x + 1, 0, num_levels - 1)] += 0.25;
  }
  return chain;
}

GridConfig default_config(int horizon, int d_max, int b_max, int p_max,
                          bool renewables_enabled) {
  GridConfig config;
  config.d_max = d_max;
  config.b_max = b_max;
  config.p_max = p_max;
  config.r_max = d_max;
  config.u1_max = d_max + b_max;
  config.c = 1.0;
  config.horizon = horizon;
  config.demand_chain = lazy_random_walk_chain(d_max + 1);
  config.price_chain = lazy_random_walk_chain(p_max + 1);
  config.renewable_dist.assign(static_cast<std::size_t>(d_max) + 1,
                               1.0 / (d_max + 1));
  config.renewables_enabled = renewables_enabled;
  return config;
}

std::vector<std::string> validate(const GridConfig& config) {
  std::vector<std::string> violations;
  if (config.d_max < 0) violations.emplace_back("d_max must be >= 0");
  if (config.b_max < 0) violations.emplace_back("b_max must be >= 0");
  if (config.p_max < 0) violations.emplace_back("p_max must be >= 0");
  if (config.u1_max < 0) violations.emplace_back("u1_max must be >= 0");
  if (config.horizon < 1) violations.emplace_back("horizon must be >= 1");
  if (!std::isfinite(config.c) || config.c < 0.0)
    violations.emplace_back("c must be finite and >= 0");
  if (!violations.empty()) return violations;
  check_chain(config.demand_chain, config.d_max + 1, "demand_chain",
              violations);
  check_chain(config.price_chain, config.p_max + 1, "price_chain", violations);
  if (config.renewables_enabled) {
    if (config.r_max < 0) violations.emplace_back("r_max must be >= 0");
    if (config.renewable_dist.size() !=
        static_cast<std::size_t>(config.r_max) + 1) {
      violations.emplace_back("renewable_dist must cover 0..r_max");
    } else {
      double sum = 0.0;
      bool ok = true;
      for (double p : config.renewable_dist) {
        if (!std::isfinite(p) || p < 0.0) {
          violations.emplace_back("renewable_dist has a bad entry");
          ok = false;
        }
        sum += p;
      }
      if (ok && std::abs(sum - 1.0) > kRowSumTolerance)
        violations.emplace_back("renewable_dist does not sum to 1");
    }
  }
  return violations;
}

std::vector<GridAction> feasible_actions(const GridConfig& config,
                                         const GridState& state) {
  std::vector<GridAction> actions;
  int spend_cap = std::min(state.b, state.d);
  actions.reserve(static_cast<std::size_t>(config.u1_max + 1) *
                  (spend_cap + 1));
  for (int u1 = 0; u1 <= config.u1_max; ++u1)
    for (int u2 = 0; u2 <= spend_cap; ++u2) actions.push_back({u1, u2});
  return actions;
}

double stage_cost(const GridConfig& config, const GridState& state,
                  const GridAction& action) {
  return config.c * (state.d - action.u2) +
         static_cast<double>(state.p) * action.u1;
}

GridState transition(const GridConfig& config, const GridState& state,
                     const GridAction& action, Rng& rng) {
  GridState next;
  next.d = sample_level(config.demand_chain[static_cast<std::size_t>(state.d)],
                        rng);
  next.p = sample_level(config.price_chain[static_cast<std::size_t>(state.p)],
                        rng);
  int r = config.renewables_enabled ? sample_level(config.renewable_dist, rng)
                                    : 0;
  next.b = next_battery(config, state.b, action, r);
  return next;
}

int num_states(const GridConfig& config) {
  return (config.d_max + 1) * (config.b_max + 1) * (config.p_max + 1);
}

int state_index(const GridConfig& config, const GridState& state) {
  return (state.d * (config.b_max + 1) + state.b) * (config.p_max + 1) +
         state.p;
}

GridState state_at(const GridConfig& config, int index) {
  GridState state;
  state.p = index % (config.p_max + 1);
  index /= config.p_max + 1;
  state.b = index % (config.b_max + 1);
  state.d = index / (config.b_max + 1);
  return state;
}

int num_actions(const GridConfig& config) {
  return (config.u1_max + 1) * (u2_cap(config) + 1);
}

int action_index(const GridConfig& config, const GridAction& action) {
  return action.u1 * (u2_cap(config) + 1) + action.u2;
}

GridAction action_at(const GridConfig& config, int index) {
  GridAction action;
  action.u1 = index / (u2_cap(config) + 1);
  action.u2 = index % (u2_cap(config) + 1);
  return action;
}

FiniteHorizonMdp to_mdp(const GridConfig& config) {
  std::vector<std::string> violations = validate(config);
  if (!violations.empty())
    throw std::invalid_argument("invalid grid config: " + violations.front());
  int S = num_states(config);
  if (S > kMaxCompiledStates)
    throw std::invalid_argument("compiled state space exceeds guard");
  int A = num_actions(config);

  std::vector<std::vector<int>> feasible(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    GridState state = state_at(config, s);
    for (const GridAction& action : feasible_actions(config, state))
      feasible[static_cast<std::size_t>(s)].push_back(
          action_index(config, action));
  }

  std::size_t table_size =
      static_cast<std::size_t>(S) * A * static_cast<std::size_t>(S);
  std::vector<double> transition(table_size, 0.0);
  std::vector<double> cost(table_size, 0.0);

  int r_hi = config.renewables_enabled ? config.r_max : 0;
  for (int s = 0; s < S; ++s) {
    GridState state = state_at(config, s);
    for (int a : feasible[static_cast<std::size_t>(s)]) {
      GridAction action = action_at(config, a);
      std::size_t row =
          (static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)) * S;
      for (int r = 0; r <= r_hi; ++r) {
        double pr = config.renewables_enabled
                        ? config.renewable_dist[static_cast<std::size_t>(r)]
                        : 1.0;
        if (pr == 0.0) continue;
        int b_next = next_battery(config, state.b, action, r);
        for (int d_next = 0; d_next <= config.d_max; ++d_next) {
          double pd =
              config.demand_chain[static_cast<std::size_t>(state.d)]
                                 [static_cast<std::size_t>(d_next)];
          if (pd == 0.0) continue;
          for (int p_next = 0; p_next <= config.p_max; ++p_next) {
            double pp =
                config.price_chain[static_cast<std::size_t>(state.p)]
                                  [static_cast<std::size_t>(p_next)];
            if (pp == 0.0) continue;
            int j = state_index(config, {d_next, b_next, p_next});
            transition[row + static_cast<std::size_t>(j)] += pr * pd * pp;
          }
        }
      }
      double g = stage_cost(config, state, action);
      for (int j = 0; j < S; ++j) cost[row + static_cast<std::size_t>(j)] = g;
    }
  }

  std::vector<double> terminal(static_cast<std::size_t>(S), 0.0);
  return FiniteHorizonMdp::stationary(config.horizon, S, A,
                                      std::move(feasible),
                                      std::move(transition), std::move(cost),
                                      std::move(terminal));
}

GridAction fill_demand_policy(const GridConfig& config,
                              const GridState& state) {
  GridAction action;
  action.u1 = clamp_int(state.d - state.b, 0, config.u1_max);
  action.u2 = std::min(state.d, state.b);
  return action;
}

GridAction fill_battery_policy(const GridConfig& config,
                               const GridState& state) {
  GridAction action;
  action.u1 = clamp_int(state.d + (config.b_max - state.b), 0, config.u1_max);
  action.u2 = std::min(state.d, state.b);
  return action;
}

PolicyFn policy_from_table(const GridConfig& config, NonstationaryPolicy pi) {
  return [config, pi = std::move(pi)](int stage, const GridState& state) {
    return action_at(config, pi.action(stage, state_index(config, state)));
  };
}

EvaluationResult evaluate_average_cost(const GridConfig& config,
                                       const PolicyFn& policy, long episodes,
                                       Rng& rng) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  {
    std::vector<std::string> violations = validate(config);
    if (!violations.empty())
      throw std::invalid_argument("invalid grid config: " + violations.front());
  }
  int S = num_states(config);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long e = 0; e < episodes; ++e) {
    Rng stream = rng.substream(static_cast<std::uint64_t>(e));
    GridState state = state_at(config, stream.next_int(S));
    double total = 0.0;
    for (int n = 0; n < config.horizon; ++n) {
      GridAction action = policy(n, state);
      if (action.u1 < 0 || action.u1 > config.u1_max || action.u2 < 0 ||
          action.u2 > std::min(state.b, state.d))
        throw std::invalid_argument("policy returned an infeasible action");
      total += stage_cost(config, state, action);
      state = transition(config, state, action, stream);
    }
    double episode_mean = total / config.horizon;
    sum += episode_mean;
    sum_sq += episode_mean * episode_mean;
  }
  EvaluationResult result;
  result.episodes = episodes;
  result.mean_cost = sum / static_cast<double>(episodes);
  if (episodes > 1) {
    double variance =
        (sum_sq - static_cast<double>(episodes) * result.mean_cost *
                      result.mean_cost) /
        static_cast<double>(episodes - 1);
    variance = std::max(0.0, variance);
    result.std_err = std::sqrt(variance / static_cast<double>(episodes));
  }
  return result;
}

}  // namespace fhmdp::grid
