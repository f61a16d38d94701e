#include "rmg/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rmg {

namespace {

constexpr double kRowSumTol = 1e-12;

}  // namespace

JointActionIndexer::JointActionIndexer(std::vector<int> action_counts)
    : counts_(std::move(action_counts)) {
  strides_.assign(counts_.size(), 1);
  for (int i = static_cast<int>(counts_.size()) - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * counts_[i + 1];
  }
  num_joint_ = 1;
  for (int c : counts_) num_joint_ *= c;
}

std::int64_t JointActionIndexer::encode(std::span<const int> actions) const {
  std::int64_t joint = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    joint += strides_[i] * actions[i];
  }
  return joint;
}

void JointActionIndexer::decode(std::int64_t joint, std::span<int> actions) const {
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    actions[i] = static_cast<int>(joint / strides_[i]);
    joint %= strides_[i];
  }
}

std::int64_t JointActionIndexer::num_excluding(int agent) const {
  return num_joint_ / counts_[agent];
}

std::int64_t JointActionIndexer::compose(int agent, int action, std::int64_t sub) const {
  std::int64_t joint = 0;
  for (int i = static_cast<int>(counts_.size()) - 1; i >= 0; --i) {
    if (i == agent) continue;
    joint += strides_[i] * (sub % counts_[i]);
    sub /= counts_[i];
  }
  return joint + strides_[agent] * action;
}

int RobustMarkovGame::sum_action_counts() const {
  return std::accumulate(action_counts.begin(), action_counts.end(), 0);
}

void validate(const RobustMarkovGame& game) {
  if (game.num_agents < 1) throw ValidationError("num_agents must be >= 1");
  if (game.num_states < 1) throw ValidationError("num_states must be >= 1");
  if (game.horizon < 1) throw ValidationError("horizon must be >= 1");
  if (static_cast<int>(game.action_counts.size()) != game.num_agents) {
    throw ValidationError("action_counts size must equal num_agents");
  }
  for (int i = 0; i < game.num_agents; ++i) {
    if (game.action_counts[i] < 1) {
      throw ValidationError("action count for agent " + std::to_string(i) +
                            " must be >= 1");
    }
  }
  if (game.uncertainty_level < 0.0 || game.uncertainty_level >= 1.0 ||
      !std::isfinite(game.uncertainty_level)) {
    throw ValidationError("uncertainty level must be in [0,1)");
  }

  std::int64_t joint = 1;
  for (int c : game.action_counts) {
    joint *= c;
    if (joint > kMaxJointActions) {
      throw ValidationError("joint action space exceeds dense-storage cap of " +
                            std::to_string(kMaxJointActions));
    }
  }
  if (game.indexer.num_joint() != joint || game.indexer.num_agents() != game.num_agents) {
    throw ValidationError("joint-action indexer does not match action_counts");
  }

  const std::int64_t kernel_size =
      static_cast<std::int64_t>(game.horizon) * game.num_states * joint * game.num_states;
  if (static_cast<std::int64_t>(game.kernel.size()) != kernel_size) {
    throw ValidationError("kernel tensor has wrong size");
  }
  const std::int64_t reward_size =
      static_cast<std::int64_t>(game.num_agents) * game.horizon * game.num_states * joint;
  if (static_cast<std::int64_t>(game.rewards.size()) != reward_size) {
    throw ValidationError("reward tensor has wrong size");
  }

  for (int h = 0; h < game.horizon; ++h) {
    for (int s = 0; s < game.num_states; ++s) {
      for (std::int64_t j = 0; j < joint; ++j) {
        const auto row = game.kernel_row(h, s, j);
        double sum = 0.0;
        for (double x : row) {
          if (x < 0.0 || !std::isfinite(x)) {
            std::ostringstream msg;
            msg << "negative or non-finite kernel entry at h=" << h << " s=" << s
                << " j=" << j;
            throw ValidationError(msg.str());
          }
          sum += x;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "non-stochastic kernel row at h=" << h << " s=" << s << " j=" << j
              << " (row sum " << sum << ")";
          throw ValidationError(msg.str());
        }
      }
    }
  }

  for (int i = 0; i < game.num_agents; ++i) {
    for (int h = 0; h < game.horizon; ++h) {
      for (int s = 0; s < game.num_states; ++s) {
        for (std::int64_t j = 0; j < joint; ++j) {
          const double r = game.reward(i, h, s, j);
          if (!(r >= 0.0 && r <= 1.0)) {
            std::ostringstream msg;
            msg << "reward out of [0,1] at i=" << i << " h=" << h << " s=" << s
                << " j=" << j;
            throw ValidationError(msg.str());
          }
        }
      }
    }
  }
}

double effective_horizon(int horizon, double uncertainty_level) {
  if (uncertainty_level <= 0.0) return static_cast<double>(horizon);
  return std::min(static_cast<double>(horizon), 1.0 / uncertainty_level);
}

double effective_horizon(const RobustMarkovGame& game) {
  return effective_horizon(game.horizon, game.uncertainty_level);
}

double robust_expectation(std::span<const double> p, std::span<const double> v,
                          double uncertainty_level) {
  double dot = 0.0;
  double vmin = v[0];
  for (std::size_t s = 0; s < p.size(); ++s) {
    dot += p[s] * v[s];
    vmin = std::min(vmin, v[s]);
  }
  return (1.0 - uncertainty_level) * dot + uncertainty_level * vmin;
}

std::vector<double> worst_case_kernel_row(std::span<const double> p,
                                          std::span<const double> v,
                                          double uncertainty_level) {
  std::size_t argmin = 0;
  for (std::size_t s = 1; s < v.size(); ++s) {
    if (v[s] < v[argmin]) argmin = s;
  }
  std::vector<double> row(p.size());
  for (std::size_t s = 0; s < p.size(); ++s) {
    row[s] = (1.0 - uncertainty_level) * p[s];
  }
  row[argmin] += uncertainty_level;
  return row;
}

double brute_force_robust_expectation(std::span<const double> p,
                                      std::span<const double> v,
                                      double uncertainty_level) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t vertex = 0; vertex < p.size(); ++vertex) {
    double dot = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
      double mass = (1.0 - uncertainty_level) * p[s];
      if (s == vertex) mass += uncertainty_level;
      dot += mass * v[s];
    }
    best = std::min(best, dot);
  }
  return best;
}

int sample_next_state(const RobustMarkovGame& game, const RandomStream& stream,
                      int h, int s, std::int64_t joint, const StreamKey& key) {
  return stream.categorical(game.kernel_row(h, s, joint), key);
}

SampleDraw draw_sample(
    const RobustMarkovGame& game, const RandomStream& stream, int h, int k,
    int agent, int s, int own_action,
    const std::vector<std::vector<std::vector<double>>>& stage_policies,
    std::vector<int>& joint_scratch) {
  joint_scratch[agent] = own_action;
  for (int j = 0; j < game.num_agents; ++j) {
    if (j == agent) continue;
    StreamKey key = StreamKey::tagged(StreamTag::kOpponentAction, j);
    key.at(h, k, agent, s, own_action);
    joint_scratch[j] = stream.categorical(stage_policies[j][s], key);
  }
  SampleDraw draw;
  draw.joint_action = game.indexer.encode(joint_scratch);
  draw.reward = game.reward(agent, h, s, draw.joint_action);
  StreamKey tkey = StreamKey::tagged(StreamTag::kTransition);
  tkey.at(h, k, agent, s, own_action);
  draw.next_state = sample_next_state(game, stream, h, s, draw.joint_action, tkey);
  return draw;
}

}  // namespace rmg
