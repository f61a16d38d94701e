#pragma once

#include <string>

#include "rmg/eval.hpp"
#include "rmg/game.hpp"
#include "rmg/policy.hpp"
#include "rmg/qftrl.hpp"

namespace rmg {

// Game document: num_agents, num_states, action_counts, horizon,
// uncertainty_level, kernel [h][s][j][s'], rewards [i][h][s][j]; zero-based,
// joint index mixed-radix with agent 0 most significant.
std::string game_to_json(const RobustMarkovGame& game);
RobustMarkovGame game_from_json(const std::string& text);

// Policy documents carry "type": "mixture" or "product".
std::string policy_to_json(const MixturePolicy& policy);
std::string policy_to_json(const ProductMarkovPolicy& policy);
bool json_is_product_policy(const std::string& text);
MixturePolicy mixture_from_json(const std::string& text);
ProductMarkovPolicy product_from_json(const std::string& text);

// Gap report with per-(i,s) gaps, the max gap, optional NE gap and the DP
// value tables.
std::string report_to_json(const GapReport& cce, const GapReport* ne);

// Per-step trace summary of a run (V-hat, beta, Q^K, sample count).
std::string trace_to_json(const RobustMarkovGame& game, const RunOutput& output);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace rmg
