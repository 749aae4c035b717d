#include "fhmdp/io.hpp"

#include <stdexcept>
#include <string>

namespace fhmdp::io {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw std::invalid_argument(std::string("missing config field: ") + key);
  return *it;
}

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  return it->get<T>();
}

std::vector<std::vector<double>> matrix_from_json(const json& doc,
                                                  const char* key) {
  return doc.at(key).get<std::vector<std::vector<double>>>();
}

}  // namespace

json mdp_to_json(const FiniteHorizonMdp& mdp) {
  int N = mdp.horizon();
  int S = mdp.num_states();
  int A = mdp.num_actions();
  json feasible = json::array();
  for (int i = 0; i < S; ++i) feasible.push_back(mdp.feasible_actions(i));
  json transition = json::array();
  json stage_cost = json::array();
  for (int n = 0; n < N; ++n) {
    json tn = json::array();
    json gn = json::array();
    for (int i = 0; i < S; ++i) {
      json ti = json::array();
      json gi = json::array();
      for (int a = 0; a < A; ++a) {
        json ta = json::array();
        json ga = json::array();
        for (int j = 0; j < S; ++j) {
          ta.push_back(mdp.transition(n, i, a, j));
          ga.push_back(mdp.stage_cost(n, i, a, j));
        }
        ti.push_back(std::move(ta));
        gi.push_back(std::move(ga));
      }
      tn.push_back(std::move(ti));
      gn.push_back(std::move(gi));
    }
    transition.push_back(std::move(tn));
    stage_cost.push_back(std::move(gn));
  }
  json terminal = json::array();
  for (int i = 0; i < S; ++i) terminal.push_back(mdp.terminal_cost(i));
  return json{{"horizon", N},
              {"num_states", S},
              {"feasible_actions", std::move(feasible)},
              {"transition", std::move(transition)},
              {"stage_cost", std::move(stage_cost)},
              {"terminal_cost", std::move(terminal)}};
}

FiniteHorizonMdp mdp_from_json(const json& doc) {
  int N = require(doc, "horizon").get<int>();
  int S = require(doc, "num_states").get<int>();
  if (N < 1 || S < 1) throw std::invalid_argument("bad instance dimensions");
  auto feasible =
      require(doc, "feasible_actions").get<std::vector<std::vector<int>>>();
  const json& transition = require(doc, "transition");
  const json& stage_cost = require(doc, "stage_cost");
  if (!transition.is_array() ||
      transition.size() != static_cast<std::size_t>(N))
    throw std::invalid_argument("transition must have one block per stage");
  if (transition[0].size() != static_cast<std::size_t>(S) ||
      transition[0][0].empty())
    throw std::invalid_argument("transition blocks are misshapen");
  int A = static_cast<int>(transition[0][0].size());

  auto flatten = [&](const json& table, const char* name) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(N) * S * A * S);
    if (table.size() != static_cast<std::size_t>(N))
      throw std::invalid_argument(std::string(name) + " has wrong stage count");
    for (const json& per_state : table) {
      if (per_state.size() != static_cast<std::size_t>(S))
        throw std::invalid_argument(std::string(name) +
                                    " has wrong state count");
      for (const json& per_action : per_state) {
        if (per_action.size() != static_cast<std::size_t>(A))
          throw std::invalid_argument(std::string(name) +
                                      " has wrong action count");
        for (const json& row : per_action) {
          if (row.size() != static_cast<std::size_t>(S))
            throw std::invalid_argument(std::string(name) +
                                        " has wrong row length");
          for (const json& v : row) flat.push_back(v.get<double>());
        }
      }
    }
    return flat;
  };

  std::vector<double> flat_transition = flatten(transition, "transition");
  std::vector<double> flat_cost = flatten(stage_cost, "stage_cost");
  auto terminal = require(doc, "terminal_cost").get<std::vector<double>>();
  return FiniteHorizonMdp(N, S, A, std::move(feasible),
                          std::move(flat_transition), std::move(flat_cost),
                          std::move(terminal));
}

RandomMdpSpec random_spec_from_json(const json& doc) {
  RandomMdpSpec spec;
  spec.horizon = require(doc, "horizon").get<int>();
  spec.num_states = require(doc, "num_states").get<int>();
  spec.num_actions = require(doc, "num_actions").get<int>();
  spec.cost_low = get_or(doc, "cost_low", spec.cost_low);
  spec.cost_high = get_or(doc, "cost_high", spec.cost_high);
  spec.terminal_cost_low =
      get_or(doc, "terminal_cost_low", spec.terminal_cost_low);
  spec.terminal_cost_high =
      get_or(doc, "terminal_cost_high", spec.terminal_cost_high);
  spec.seed = get_or(doc, "seed", spec.seed);
  return spec;
}

fhql::LearnerConfig learner_from_json(const json& doc) {
  fhql::LearnerConfig config;
  config.epsilon = get_or(doc, "epsilon", config.epsilon);
  config.max_iterations = get_or(doc, "max_iterations", config.max_iterations);
  if (doc.contains("schedule"))
    config.schedule.block_length = get_or(
        doc.at("schedule"), "block_length", config.schedule.block_length);
  config.seed = get_or(doc, "seed", config.seed);
  config.trace_stride = get_or(doc, "trace_stride", config.trace_stride);
  std::string mode = get_or<std::string>(doc, "update_mode", "synchronous");
  if (mode == "synchronous") {
    config.update_mode = fhql::UpdateMode::synchronous;
  } else if (mode == "single_sample") {
    config.update_mode = fhql::UpdateMode::single_sample;
  } else {
    throw std::invalid_argument("unknown update_mode: " + mode);
  }
  return config;
}

grid::GridConfig grid_config_from_json(const json& doc) {
  grid::GridConfig config;
  config.d_max = require(doc, "d_max").get<int>();
  config.b_max = require(doc, "b_max").get<int>();
  config.p_max = require(doc, "p_max").get<int>();
  config.horizon = require(doc, "horizon").get<int>();
  if (config.d_max < 0 || config.b_max < 0 || config.p_max < 0 ||
      config.horizon < 1)
    throw std::invalid_argument("bad grid dimensions");
  config.r_max = get_or(doc, "r_max", config.d_max);
  config.u1_max = get_or(doc, "u1_max", config.d_max + config.b_max);
  config.c = get_or(doc, "c", 1.0);
  config.demand_chain =
      doc.contains("demand_chain")
          ? matrix_from_json(doc, "demand_chain")
          : grid::lazy_random_walk_chain(config.d_max + 1);
  config.price_chain = doc.contains("price_chain")
                           ? matrix_from_json(doc, "price_chain")
                           : grid::lazy_random_walk_chain(config.p_max + 1);
  if (doc.contains("renewable_dist")) {
    config.renewable_dist =
        doc.at("renewable_dist").get<std::vector<double>>();
  } else {
    config.renewable_dist.assign(static_cast<std::size_t>(config.r_max) + 1,
                                 1.0 / (config.r_max + 1));
  }
  config.renewables_enabled = get_or(doc, "renewables_enabled", false);
  config.seed = get_or(doc, "seed", config.seed);
  return config;
}

}  // namespace fhmdp::io
