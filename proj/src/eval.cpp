#include "rmg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rmg {

namespace {

constexpr double kGapFloor = -1e-10;

void check_policy_shape(const RobustMarkovGame& game, const MixturePolicy& policy) {
  if (policy.horizon() != game.horizon) {
    throw ValidationError("policy horizon does not match game");
  }
  for (const auto& step : policy.steps) {
    for (const auto& comp : step.components) {
      if (comp.num_agents() != game.num_agents) {
        throw ValidationError("policy agent count does not match game");
      }
      for (int i = 0; i < game.num_agents; ++i) {
        if (static_cast<int>(comp.dist[i].size()) != game.num_states ||
            static_cast<int>(comp.dist[i][0].size()) != game.action_counts[i]) {
          throw ValidationError("policy table shape does not match game");
        }
      }
    }
  }
}

double min_of(std::span<const double> v) {
  double out = v[0];
  for (double x : v) out = std::min(out, x);
  return out;
}

RobustValueProfile value_dp(const RobustMarkovGame& game,
                            const MixturePolicy& policy) {
  const int m = game.num_agents;
  const int S = game.num_states;
  const int H = game.horizon;
  const double R = game.uncertainty_level;
  const std::int64_t joint = game.num_joint_actions();

  RobustValueProfile out;
  out.values.assign(
      m, std::vector<std::vector<double>>(H + 1, std::vector<double>(S, 0.0)));

  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      const auto dist = joint_action_distribution(policy, game.indexer, h, s);
      for (int i = 0; i < m; ++i) {
        const auto& v_next = out.values[i][h + 1];
        const double v_min = min_of(v_next);
        double total = 0.0;
        for (std::int64_t j = 0; j < joint; ++j) {
          if (dist[j] == 0.0) continue;
          double dot = 0.0;
          const auto row = game.kernel_row(h, s, j);
          for (int sp = 0; sp < S; ++sp) dot += row[sp] * v_next[sp];
          total += dist[j] *
                   (game.reward(i, h, s, j) + (1.0 - R) * dot + R * v_min);
        }
        out.values[i][h][s] = total;
      }
    }
  }
  return out;
}

GapReport build_report(const RobustMarkovGame& game, RobustValueProfile policy_values,
                       std::vector<BestResponseResult> best) {
  const int m = game.num_agents;
  const int S = game.num_states;
  GapReport report;
  report.policy_values = std::move(policy_values);
  report.best_responses = std::move(best);
  report.gaps.assign(m, std::vector<double>(S, 0.0));
  report.per_agent_max.assign(m, 0.0);
  report.max_gap = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int s = 0; s < S; ++s) {
      double gap = report.best_responses[i].v_star[0][s] -
                   report.policy_values.values[i][0][s];
      if (gap < kGapFloor) {
        throw ValidationError("best-response dominance violated: gap " +
                              std::to_string(gap) + " for agent " +
                              std::to_string(i) + " state " + std::to_string(s));
      }
      gap = std::max(gap, 0.0);
      report.gaps[i][s] = gap;
      report.per_agent_max[i] = std::max(report.per_agent_max[i], gap);
      report.max_gap = std::max(report.max_gap, gap);
    }
  }
  return report;
}

}  // namespace

RobustValueProfile robust_value_of_policy(const RobustMarkovGame& game,
                                          const MixturePolicy& policy) {
  check_policy_shape(game, policy);
  return value_dp(game, policy);
}

RobustValueProfile robust_value_of_policy(const RobustMarkovGame& game,
                                          const ProductMarkovPolicy& policy) {
  return robust_value_of_policy(game, as_mixture(policy));
}

double robust_q_value(const RobustMarkovGame& game, int agent, int h, int s,
                      std::int64_t joint, std::span<const double> v_next) {
  const auto row = game.kernel_row(h, s, joint);
  return game.reward(agent, h, s, joint) +
         robust_expectation(row, v_next, game.uncertainty_level);
}

BestResponseResult robust_best_response(const RobustMarkovGame& game,
                                        const MixturePolicy& policy, int agent) {
  check_policy_shape(game, policy);
  const int S = game.num_states;
  const int H = game.horizon;
  const double R = game.uncertainty_level;
  const int a_count = game.action_counts[agent];
  const std::int64_t sub_count = game.indexer.num_excluding(agent);

  BestResponseResult out;
  out.v_star.assign(H + 1, std::vector<double>(S, 0.0));
  out.policy.assign(H, std::vector<double>(S, 0.0));
  out.policy_rows.assign(
      H, std::vector<std::vector<double>>(S, std::vector<double>(a_count, 0.0)));

  for (int h = H - 1; h >= 0; --h) {
    const auto& v_next = out.v_star[h + 1];
    const double v_min = min_of(v_next);
    for (int s = 0; s < S; ++s) {
      const auto marginal = marginal_excluding(policy, game.indexer, h, s, agent);
      double best = -std::numeric_limits<double>::infinity();
      int best_action = 0;
      for (int a = 0; a < a_count; ++a) {
        double total = 0.0;
        for (std::int64_t sub = 0; sub < sub_count; ++sub) {
          if (marginal[sub] == 0.0) continue;
          const std::int64_t j = game.indexer.compose(agent, a, sub);
          double dot = 0.0;
          const auto row = game.kernel_row(h, s, j);
          for (int sp = 0; sp < S; ++sp) dot += row[sp] * v_next[sp];
          total += marginal[sub] *
                   (game.reward(agent, h, s, j) + (1.0 - R) * dot + R * v_min);
        }
        if (total > best) {
          best = total;
          best_action = a;
        }
      }
      out.v_star[h][s] = best;
      out.policy[h][s] = best_action;
      out.policy_rows[h][s][best_action] = 1.0;
    }
  }
  return out;
}

BestResponseResult robust_best_response(const RobustMarkovGame& game,
                                        const ProductMarkovPolicy& policy,
                                        int agent) {
  return robust_best_response(game, as_mixture(policy), agent);
}

GapReport cce_gap(const RobustMarkovGame& game, const MixturePolicy& policy) {
  RobustValueProfile values = robust_value_of_policy(game, policy);
  std::vector<BestResponseResult> best;
  best.reserve(game.num_agents);
  for (int i = 0; i < game.num_agents; ++i) {
    best.push_back(robust_best_response(game, policy, i));
  }
  return build_report(game, std::move(values), std::move(best));
}

GapReport ne_gap(const RobustMarkovGame& game, const ProductMarkovPolicy& policy) {
  return cce_gap(game, as_mixture(policy));
}

std::vector<double> enumerate_deviations_oracle(const RobustMarkovGame& game,
                                                const MixturePolicy& policy,
                                                int agent) {
  check_policy_shape(game, policy);
  const int S = game.num_states;
  const int H = game.horizon;
  const int a_count = game.action_counts[agent];

  double combos = 1.0;
  for (int cell = 0; cell < S * H; ++cell) {
    combos *= a_count;
    if (combos > 1e6) {
      throw ValidationError("deviation enumeration exceeds 1e6 policies");
    }
  }

  const std::int64_t total = static_cast<std::int64_t>(combos);
  std::vector<double> best(S, -std::numeric_limits<double>::infinity());
  std::vector<int> choice(S * H, 0);

  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t rest = idx;
    for (int cell = 0; cell < S * H; ++cell) {
      choice[cell] = static_cast<int>(rest % a_count);
      rest /= a_count;
    }
    // Swap agent's tables for the deterministic deviation in every component.
    MixturePolicy deviated = policy;
    for (int h = 0; h < H; ++h) {
      for (auto& comp : deviated.steps[h].components) {
        for (int s = 0; s < S; ++s) {
          auto& row = comp.dist[agent][s];
          std::fill(row.begin(), row.end(), 0.0);
          row[choice[h * S + s]] = 1.0;
        }
      }
    }
    const RobustValueProfile profile = robust_value_of_policy(game, deviated);
    for (int s = 0; s < S; ++s) {
      best[s] = std::max(best[s], profile.values[agent][0][s]);
    }
  }
  return best;
}

}  // namespace rmg
