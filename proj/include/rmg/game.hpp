#pragma once

#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <vector>

#include "rmg/rng.hpp"

namespace rmg {

// Thrown on any model or input contract violation; the CLI maps it to exit
// code 1.
class ValidationError : public std::exception {
 public:
  explicit ValidationError(std::string message) : message_(std::move(message)) {}
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

// Mixed-radix codec between per-agent actions and the flat joint-action
// index. Agent 0 is the most significant digit.
class JointActionIndexer {
 public:
  JointActionIndexer() = default;
  explicit JointActionIndexer(std::vector<int> action_counts);

  int num_agents() const { return static_cast<int>(counts_.size()); }
  std::int64_t num_joint() const { return num_joint_; }
  int count(int agent) const { return counts_[agent]; }
  const std::vector<int>& counts() const { return counts_; }

  std::int64_t encode(std::span<const int> actions) const;
  void decode(std::int64_t joint, std::span<int> actions) const;

  // Sub-space over all agents except `agent`, same agent order.
  std::int64_t num_excluding(int agent) const;
  // Flat joint index from agent's own action plus a sub-space index.
  std::int64_t compose(int agent, int action, std::int64_t sub) const;

 private:
  std::vector<int> counts_;
  std::vector<std::int64_t> strides_;
  std::int64_t num_joint_ = 1;
};

// Tabular finite-horizon robust Markov game with an R-contamination
// uncertainty set around the nominal kernel.
//
// Storage is dense and zero-based: kernel[h][s][j][s'] and
// rewards[i][h][s][j] flattened row-major, with j the mixed-radix joint
// action (agent 0 most significant).
struct RobustMarkovGame {
  int num_agents = 0;
  int num_states = 0;
  std::vector<int> action_counts;
  int horizon = 0;
  double uncertainty_level = 0.0;
  std::vector<double> kernel;   // H * S * J * S
  std::vector<double> rewards;  // m * H * S * J

  JointActionIndexer indexer;  // derived from action_counts

  std::int64_t num_joint_actions() const { return indexer.num_joint(); }
  int sum_action_counts() const;

  std::span<const double> kernel_row(int h, int s, std::int64_t joint) const {
    const std::int64_t base =
        ((static_cast<std::int64_t>(h) * num_states + s) * indexer.num_joint() + joint) *
        num_states;
    return {kernel.data() + base, static_cast<std::size_t>(num_states)};
  }
  double reward(int agent, int h, int s, std::int64_t joint) const {
    const std::int64_t base =
        ((static_cast<std::int64_t>(agent) * horizon + h) * num_states + s) *
            indexer.num_joint() +
        joint;
    return rewards[base];
  }
  double& reward_ref(int agent, int h, int s, std::int64_t joint) {
    const std::int64_t base =
        ((static_cast<std::int64_t>(agent) * horizon + h) * num_states + s) *
            indexer.num_joint() +
        joint;
    return rewards[base];
  }
};

// Dense-storage guard for the exact DP: refuse games whose joint-action
// space would not be tractable to enumerate.
inline constexpr std::int64_t kMaxJointActions = 1'000'000;

// Checks every model invariant; throws ValidationError naming the first
// offending entry.
void validate(const RobustMarkovGame& game);

// min{H, 1/R}; H when R = 0.
double effective_horizon(int horizon, double uncertainty_level);
double effective_horizon(const RobustMarkovGame& game);

// Closed form of inf_{P in U^R(p)} <P, v> for the R-contamination set:
// (1-R) <p, v> + R min(v).
double robust_expectation(std::span<const double> p, std::span<const double> v,
                          double uncertainty_level);

// The minimizing kernel row (1-R) p + R e_{argmin v}; argmin ties break to
// the lowest state index.
std::vector<double> worst_case_kernel_row(std::span<const double> p,
                                          std::span<const double> v,
                                          double uncertainty_level);

// Independent oracle: enumerate the S vertices (1-R) p + R e_{s'} of the
// contamination polytope and take the minimum inner product with v.
double brute_force_robust_expectation(std::span<const double> p,
                                      std::span<const double> v,
                                      double uncertainty_level);

// One generative-model draw from the nominal kernel row P0[h][s][j].
int sample_next_state(const RobustMarkovGame& game, const RandomStream& stream,
                      int h, int s, std::int64_t joint, const StreamKey& key);

// One sample tuple for agent `agent` at (h, s) with its own action pinned:
// opponents drawn from their stage rows, reward by deterministic lookup,
// next state from the nominal kernel. The draws are keyed by
// (seed, h, k, agent, s, own_action, {opponent j | transition}).
struct SampleDraw {
  std::int64_t joint_action = 0;
  double reward = 0.0;
  int next_state = 0;
};

SampleDraw draw_sample(
    const RobustMarkovGame& game, const RandomStream& stream, int h, int k,
    int agent, int s, int own_action,
    const std::vector<std::vector<std::vector<double>>>& stage_policies,
    std::vector<int>& joint_scratch);

}  // namespace rmg
