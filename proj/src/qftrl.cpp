#include "rmg/qftrl.hpp"

#include <algorithm>
#include <cmath>

namespace rmg {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kMonotoneTol = 1e-12;
constexpr double kRangeTol = 1e-9;

bool stochastic_positive_row(std::span<const double> row) {
  double sum = 0.0;
  for (double x : row) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= kRowTol;
}

}  // namespace

double AlgoConfig::effective_c_b() const {
  return theory_constants ? 2.0 * std::sqrt(c_alpha + 1.0) : c_b;
}

bool is_zero_sum_encoded(const RobustMarkovGame& game) {
  if (game.num_agents != 2) return false;
  const std::int64_t joint = game.num_joint_actions();
  for (int h = 0; h < game.horizon; ++h) {
    for (int s = 0; s < game.num_states; ++s) {
      for (std::int64_t j = 0; j < joint; ++j) {
        if (std::abs(game.reward(0, h, s, j) + game.reward(1, h, s, j) - 1.0) > 1e-12) {
          return false;
        }
      }
    }
  }
  return true;
}

double bonus_beta(std::span<const double> round_variances,
                  std::span<const double> weights, double c_b, double delta,
                  int rounds, int num_states, int sum_actions,
                  double eff_horizon) {
  if (c_b == 0.0) return 0.0;
  const double log_term =
      std::log(static_cast<double>(rounds) * num_states * sum_actions / delta);
  const double prefactor =
      c_b * std::sqrt(log_term * log_term * log_term / (rounds * eff_horizon));
  double weighted = 0.0;
  for (std::size_t k = 0; k < round_variances.size(); ++k) {
    weighted += weights[k] * (round_variances[k] + eff_horizon);
  }
  return prefactor * weighted;
}

double value_estimate(std::span<const double> round_means,
                      std::span<const double> weights, double beta,
                      int steps_remaining) {
  double mean = 0.0;
  for (std::size_t k = 0; k < round_means.size(); ++k) {
    mean += weights[k] * round_means[k];
  }
  return std::min(mean + beta, static_cast<double>(steps_remaining));
}

ProductMarkovPolicy zero_sum_product_output(const RobustMarkovGame& game,
                                            const MixturePolicy& mixture) {
  if (game.num_agents != 2) {
    throw ValidationError("zero-sum product output requires exactly 2 agents");
  }
  if (!is_zero_sum_encoded(game)) {
    throw ValidationError(
        "zero-sum product output requires r1 + r2 = 1 everywhere");
  }
  return average_to_product(mixture);
}

RunOutput run_robust_qftrl(const RobustMarkovGame& game, const AlgoConfig& config) {
  validate(game);
  if (config.rounds < 1) throw ValidationError("round count K must be >= 1");
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw ValidationError("delta must be in (0,1)");
  }
  if (config.c_b < 0.0) throw ValidationError("c_b must be >= 0");

  const int m = game.num_agents;
  const int S = game.num_states;
  const int H = game.horizon;
  const int K = config.rounds;
  const double R = game.uncertainty_level;
  const int sum_a = game.sum_action_counts();
  const std::int64_t budget =
      static_cast<std::int64_t>(K) * H * S * sum_a;
  if (budget > config.sample_budget_cap) {
    throw ValidationError("sample budget " + std::to_string(budget) +
                          " exceeds cap " + std::to_string(config.sample_budget_cap));
  }

  const double eff = effective_horizon(game);
  const double c_b = config.effective_c_b();
  const Schedules sched = build_schedules(K, config.c_alpha, H, R);
  const auto weights = sched.weights();
  const RandomStream stream(config.seed);

  RunOutput out;
  out.schedules = sched;
  out.mixture.steps.resize(H);

  // V-hat rows, 0-based step index; row H is terminal zero.
  out.values.values.assign(
      m, std::vector<std::vector<double>>(H + 1, std::vector<double>(S, 0.0)));
  out.q_tables.values.resize(m);
  for (int i = 0; i < m; ++i) {
    out.q_tables.values[i].assign(
        H, std::vector<std::vector<double>>(
               S, std::vector<double>(game.action_counts[i], 0.0)));
  }

  const std::int64_t trace_doubles =
      2ll * K * H * S * sum_a;
  if (config.record_trace) {
    out.trace.emplace();
    out.trace->full = trace_doubles <= config.trace_cap_doubles;
    out.trace->weighted_mean.assign(
        m, std::vector<std::vector<double>>(H, std::vector<double>(S, 0.0)));
    out.trace->weighted_var = out.trace->weighted_mean;
    out.trace->beta = out.trace->weighted_mean;
    if (out.trace->full) {
      out.trace->q_rounds.resize(H);
      out.trace->pi_rounds.resize(H);
    }
  }

  std::int64_t draws = 0;
  std::vector<int> joint_actions(m);

  for (int h = H - 1; h >= 0; --h) {
    // Round-local state: Q tables, frozen round-k policies, next policies.
    std::vector<std::vector<std::vector<double>>> q_table(m);
    std::vector<std::vector<std::vector<double>>> pi_cur(m), pi_next(m);
    for (int i = 0; i < m; ++i) {
      const int a_count = game.action_counts[i];
      q_table[i].assign(S, std::vector<double>(a_count, 0.0));
      pi_cur[i].assign(S, std::vector<double>(a_count, 1.0 / a_count));
      pi_next[i] = pi_cur[i];
    }

    std::vector<std::vector<double>> weighted_mean(m, std::vector<double>(S, 0.0));
    std::vector<std::vector<double>> weighted_var_m(m, std::vector<double>(S, 0.0));

    auto& step_out = out.mixture.steps[h];
    step_out.weights.assign(weights.begin(), weights.end());
    step_out.components.resize(K);

    if (out.trace && out.trace->full) {
      out.trace->q_rounds[h].resize(K);
      out.trace->pi_rounds[h].resize(K);
    }

    std::vector<double> q_round;  // scratch q^k(s, .) per agent

    for (int k = 1; k <= K; ++k) {
      // Snapshot the frozen round-k product policy into the mixture.
      auto& comp = step_out.components[k - 1];
      comp.dist = pi_cur;
      if (out.trace && out.trace->full) {
        out.trace->pi_rounds[h][k - 1] = pi_cur;
      }

      const double alpha_k = sched.alpha[k];
      const double w_k = weights[k - 1];
      const double eta_next = sched.eta[k + 1];

      for (int i = 0; i < m; ++i) {
        const int a_count = game.action_counts[i];
        const std::vector<double>& v_next = out.values.values[i][h + 1];
        double v_min = v_next[0];
        for (double v : v_next) v_min = std::min(v_min, v);

        auto& q_i = q_table[i];
        if (out.trace && out.trace->full) {
          out.trace->q_rounds[h][k - 1].resize(m);
          out.trace->q_rounds[h][k - 1][i].assign(S, {});
        }
        for (int s = 0; s < S; ++s) {
          q_round.assign(a_count, 0.0);
          for (int a = 0; a < a_count; ++a) {
            // Opponents draw from their frozen round-k policies; the owner's
            // action stays pinned to a.
            const SampleDraw draw =
                draw_sample(game, stream, h, k, i, s, a, pi_cur, joint_actions);
            ++draws;
            q_round[a] =
                draw.reward + (1.0 - R) * v_next[draw.next_state] + R * v_min;
          }

          // Robust Q-learning update and the weighted mean/variance terms
          // feeding the bonus.
          double mean_k = 0.0, second_k = 0.0;
          auto& q_row = q_i[s];
          for (int a = 0; a < a_count; ++a) {
            q_row[a] = (1.0 - alpha_k) * q_row[a] + alpha_k * q_round[a];
            mean_k += pi_cur[i][s][a] * q_round[a];
            second_k += pi_cur[i][s][a] * q_round[a] * q_round[a];
          }
          const double var_k = std::max(0.0, second_k - mean_k * mean_k);
          weighted_mean[i][s] += w_k * mean_k;
          weighted_var_m[i][s] += w_k * (var_k + eff);

          ftrl_update_into(q_row, eta_next, pi_next[i][s]);
          if (!stochastic_positive_row(pi_next[i][s])) {
            ++out.checks.invariant_violations;
          }
          if (out.trace && out.trace->full) {
            out.trace->q_rounds[h][k - 1][i][s] = q_round;
          }
        }
      }
      for (int i = 0; i < m; ++i) pi_cur[i] = pi_next[i];
    }

    // Bonus and clipped value estimate for this step.
    const double log_term = std::log(static_cast<double>(K) * S * sum_a / config.delta);
    const double prefactor =
        c_b == 0.0
            ? 0.0
            : c_b * std::sqrt(log_term * log_term * log_term / (K * eff));
    const int steps_remaining = H - h;
    for (int i = 0; i < m; ++i) {
      const std::vector<double>& v_next = out.values.values[i][h + 1];
      double next_min = v_next[0];
      for (double v : v_next) next_min = std::min(next_min, v);

      auto& v_row = out.values.values[i][h];
      double row_min = 0.0, row_max = 0.0;
      for (int s = 0; s < S; ++s) {
        const double beta = prefactor * weighted_var_m[i][s];
        v_row[s] = std::min(weighted_mean[i][s] + beta,
                            static_cast<double>(steps_remaining));
        if (out.trace) {
          out.trace->weighted_mean[i][h][s] = weighted_mean[i][s];
          out.trace->weighted_var[i][h][s] = weighted_var_m[i][s];
          out.trace->beta[i][h][s] = beta;
        }
        if (s == 0) {
          row_min = row_max = v_row[s];
        } else {
          row_min = std::min(row_min, v_row[s]);
          row_max = std::max(row_max, v_row[s]);
        }
      }

      // Hard invariants: clip range and min-value monotonicity across h.
      for (int s = 0; s < S; ++s) {
        if (!(v_row[s] >= 0.0 && v_row[s] <= steps_remaining)) {
          ++out.checks.invariant_violations;
        }
      }
      if (row_min < next_min - kMonotoneTol) {
        ++out.checks.invariant_violations;
      }

      // Lemma-1 range bound; proven only in the theorem's sample regime, so
      // it warns instead of failing.
      double range_bound = 0.0;
      double decay = 1.0;
      for (int t = h; t < H; ++t) {
        range_bound += decay;
        decay *= (1.0 - R);
      }
      if (row_max - row_min > 3.0 * range_bound + kRangeTol) {
        ++out.checks.range_bound_warnings;
      }
    }

    out.q_tables.values.resize(m);
    for (int i = 0; i < m; ++i) out.q_tables.values[i][h] = q_table[i];
  }

  const std::int64_t expected_draws =
      static_cast<std::int64_t>(K) * H * S * sum_a;
  if (draws != expected_draws) ++out.checks.invariant_violations;
  out.sample_count = draws;

  if (is_zero_sum_encoded(game)) {
    out.zero_sum_products = average_to_product(out.mixture);
  }
  return out;
}

}  // namespace rmg
