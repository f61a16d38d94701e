#pragma once

#include <vector>

#include "rmg/game.hpp"
#include "rmg/policy.hpp"

namespace rmg {

// Exact robust values V[i][h][s] under a fixed joint policy; h in [0, H]
// with row H the terminal zeros.
struct RobustValueProfile {
  std::vector<std::vector<std::vector<double>>> values;
};

// Robust best-response DP result for one agent: V*[h][s] plus the attaining
// deterministic Markov policy (one-hot rows).
struct BestResponseResult {
  std::vector<std::vector<double>> v_star;          // [h][s], h in [0, H]
  std::vector<std::vector<double>> policy;          // [h][s] -> chosen action (as index)
  std::vector<std::vector<std::vector<double>>> policy_rows;  // [h][s][a] one-hot
};

struct GapReport {
  // gaps[i][s] = V*_{i,1}(s) - V_{i,1}(s), clamped into [0, inf) from
  // [-1e-10, 0); anything below -1e-10 is an internal DP error.
  std::vector<std::vector<double>> gaps;
  std::vector<double> per_agent_max;  // max over states per agent
  double max_gap = 0.0;               // max over (i, s)
  RobustValueProfile policy_values;
  std::vector<BestResponseResult> best_responses;  // per agent
};

// Backward induction of the robust Bellman consistency equation
//   V_{i,h}(s) = E_{a ~ pi_h(.|s)}[ r + (1-R) <P0, V_{i,h+1}> + R min V_{i,h+1} ].
RobustValueProfile robust_value_of_policy(const RobustMarkovGame& game,
                                          const MixturePolicy& policy);
RobustValueProfile robust_value_of_policy(const RobustMarkovGame& game,
                                          const ProductMarkovPolicy& policy);

// One-step robust Q query from a next-step value vector; the Q tensor is
// never materialized.
double robust_q_value(const RobustMarkovGame& game, int agent, int h, int s,
                      std::int64_t joint, std::span<const double> v_next);

// Best response of `agent` against the policy's correlated marginal of the
// others; argmax ties break to the lowest action index.
BestResponseResult robust_best_response(const RobustMarkovGame& game,
                                        const MixturePolicy& policy, int agent);
BestResponseResult robust_best_response(const RobustMarkovGame& game,
                                        const ProductMarkovPolicy& policy,
                                        int agent);

// epsilon-robust CCE gap of a (possibly correlated) mixture policy.
GapReport cce_gap(const RobustMarkovGame& game, const MixturePolicy& policy);

// epsilon-robust NE gap of a product policy (independent agents).
GapReport ne_gap(const RobustMarkovGame& game, const ProductMarkovPolicy& policy);

// Test oracle: exhaustive maximum over all deterministic Markov deviations
// of one agent. Guarded to A_i^(S*H) <= 1e6 combinations.
std::vector<double> enumerate_deviations_oracle(const RobustMarkovGame& game,
                                                const MixturePolicy& policy,
                                                int agent);

}  // namespace rmg
