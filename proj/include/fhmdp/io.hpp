#pragma once

#include <json.hpp>

#include "fhmdp/mdp.hpp"
#include "fhmdp/qlearning.hpp"
#include "fhmdp/random_mdp.hpp"
#include "fhmdp/smart_grid.hpp"

namespace fhmdp::io {

// Instance document: {horizon, num_states, feasible_actions, transition,
// stage_cost, terminal_cost} with transition and stage_cost as nested
// [n][i][a][j] arrays. Serialization always writes the full stage-dependent
// form; numeric values round-trip exactly.
nlohmann::json mdp_to_json(const FiniteHorizonMdp& mdp);
FiniteHorizonMdp mdp_from_json(const nlohmann::json& doc);

// Config fragments. Absent fields fall back to the documented defaults;
// malformed fields throw std::invalid_argument.
RandomMdpSpec random_spec_from_json(const nlohmann::json& doc);
fhql::LearnerConfig learner_from_json(const nlohmann::json& doc);
grid::GridConfig grid_config_from_json(const nlohmann::json& doc);

}  // namespace fhmdp::io
