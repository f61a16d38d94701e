#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rmg/game.hpp"
#include "rmg/policy.hpp"
#include "rmg/schedules.hpp"

namespace rmg {

struct AlgoConfig {
  int rounds = 1;                 // K, rounds per step
  double c_alpha = 24.0;          // step-size constant
  double c_b = 0.5;               // bonus constant (practical default)
  double delta = 0.01;            // confidence level
  std::uint64_t seed = 0;
  bool record_trace = false;
  bool theory_constants = false;  // raise c_b to 2 sqrt(c_alpha + 1)
  std::int64_t sample_budget_cap = 100'000'000;
  // Full per-round traces thin to per-step summaries past this many doubles.
  std::int64_t trace_cap_doubles = 8'000'000;

  double effective_c_b() const;
};

// Per-agent, per-step Q tables: q[i][h][s][a_i]; h is 0-based over [0, H).
struct QTable {
  std::vector<std::vector<std::vector<std::vector<double>>>> values;
};

// Clipped optimistic value estimates: v[i][h][s] with h in [0, H]; row H is
// the terminal all-zeros vector.
struct ValueTable {
  std::vector<std::vector<std::vector<double>>> values;
};

// Per-round snapshot retained when record_trace is on: the q rows and the
// round's policy rows, enough to replay Q^K and the value estimate exactly.
struct RunTrace {
  bool full = false;
  // [h][k][i][s][a_i]
  std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>> q_rounds;
  std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>> pi_rounds;
  // Always present: per-(i,h,s) weighted mean/variance accumulators.
  std::vector<std::vector<std::vector<double>>> weighted_mean;  // [i][h][s]
  std::vector<std::vector<std::vector<double>>> weighted_var;   // [i][h][s]
  std::vector<std::vector<std::vector<double>>> beta;           // [i][h][s]
};

// Zero or nonzero counts of runtime contract checks evaluated inside the
// solver loop; violations of hard invariants vs. the Lemma-1 range bound
// which only warns outside the theorem's sample-size regime.
struct RuntimeChecks {
  std::int64_t invariant_violations = 0;
  std::int64_t range_bound_warnings = 0;
};

struct RunOutput {
  MixturePolicy mixture;
  // Present iff m = 2 and rewards satisfy r1 + r2 = 1 everywhere (the [0,1]
  // affine encoding of zero sum).
  std::optional<ProductMarkovPolicy> zero_sum_products;
  ValueTable values;
  QTable q_tables;
  std::int64_t sample_count = 0;  // K * H * S * sum_i A_i
  Schedules schedules;
  RuntimeChecks checks;
  std::optional<RunTrace> trace;
};

// True iff the game is two-player with r1 + r2 = 1 everywhere (within 1e-12).
bool is_zero_sum_encoded(const RobustMarkovGame& game);

// The optimism bonus for one (i, h, s):
//   c_b sqrt(log^3(K S sumA / delta) / (K M)) sum_k w_k (Var_k + M),
// with M = min{H, 1/R} and Var_k the action-variance of the round-k q row
// under the round-k policy.
double bonus_beta(std::span<const double> round_variances,
                  std::span<const double> weights, double c_b, double delta,
                  int rounds, int num_states, int sum_actions,
                  double eff_horizon);

// The clipped value estimate for one (i, h, s):
//   min{ sum_k w_k E_{a ~ pi_k}[q_k] + beta, H - h + 1 }   (h 1-based).
double value_estimate(std::span<const double> round_means,
                      std::span<const double> weights, double beta,
                      int steps_remaining);

// Weighted per-agent average of the K stage policies; defined for two-player
// zero-sum games only.
ProductMarkovPolicy zero_sum_product_output(const RobustMarkovGame& game,
                                            const MixturePolicy& mixture);

// Algorithm: backwards over h, K rounds of generative sampling, robust
// Q-learning updates and FTRL policy updates per agent, then the bonus and
// clipped value estimate; output mixture weighted by alpha_k^K.
// Deterministic in (game, config).
RunOutput run_robust_qftrl(const RobustMarkovGame& game, const AlgoConfig& config);

}  // namespace rmg
