#include <cmath>
#include <vector>

#include "doctest.h"
#include "rmg/qftrl.hpp"
#include "test_support.hpp"

using namespace rmg;
using rmg::testing::make_zero_sum;
using rmg::testing::one_cell_game;
using rmg::testing::random_game;

namespace {

constexpr double kUnitWeight = 1.0;

AlgoConfig basic_config(int rounds, std::uint64_t seed, double c_b = 0.5) {
  AlgoConfig config;
  config.rounds = rounds;
  config.seed = seed;
  config.c_b = c_b;
  return config;
}

bool same_mixture(const MixturePolicy& a, const MixturePolicy& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t h = 0; h < a.steps.size(); ++h) {
    if (a.steps[h].weights != b.steps[h].weights) return false;
    if (a.steps[h].components.size() != b.steps[h].components.size()) return false;
    for (std::size_t k = 0; k < a.steps[h].components.size(); ++k) {
      if (a.steps[h].components[k].dist != b.steps[h].components[k].dist) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("one-cell game with c_b=0 recovers the reward exactly") {
  const RobustMarkovGame game = one_cell_game(0.37);
  AlgoConfig config = basic_config(1, 3, /*c_b=*/0.0);
  const RunOutput out = run_robust_qftrl(game, config);
  CHECK(out.values.values[0][0][0] == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(out.sample_count == 1);
  CHECK(out.checks.invariant_violations == 0);
}

TEST_CASE("one-cell game with a bonus clips at the horizon") {
  const RobustMarkovGame game = one_cell_game(0.9);
  AlgoConfig config = basic_config(1, 3, /*c_b=*/50.0);
  const RunOutput out = run_robust_qftrl(game, config);
  CHECK(out.values.values[0][0][0] == doctest::Approx(1.0));
}

TEST_CASE("sample accounting matches K H S sum(A_i)") {
  const RobustMarkovGame game = random_game(2, 3, {2, 3}, 4, 0.2, 17);
  AlgoConfig config = basic_config(6, 11);
  const RunOutput out = run_robust_qftrl(game, config);
  CHECK(out.sample_count == 6ll * 4 * 3 * (2 + 3));
  CHECK(out.checks.invariant_violations == 0);
}

TEST_CASE("identical game and seed reproduce the run bit for bit") {
  const RobustMarkovGame game = random_game(2, 2, {2, 2}, 3, 0.1, 23);
  AlgoConfig config = basic_config(16, 5);
  const RunOutput first = run_robust_qftrl(game, config);
  const RunOutput second = run_robust_qftrl(game, config);
  CHECK(same_mixture(first.mixture, second.mixture));
  CHECK(first.values.values == second.values.values);
  CHECK(first.q_tables.values == second.q_tables.values);

  AlgoConfig other = config;
  other.seed = 6;
  const RunOutput third = run_robust_qftrl(game, other);
  CHECK_FALSE(same_mixture(first.mixture, third.mixture));
}

TEST_CASE("sample budget cap rejects oversized runs") {
  const RobustMarkovGame game = one_cell_game(0.5);
  AlgoConfig config = basic_config(1000, 1);
  config.sample_budget_cap = 999;
  CHECK_THROWS_AS(run_robust_qftrl(game, config), ValidationError);
}

TEST_CASE("trace replay reproduces Q^K and the value estimate") {
  const RobustMarkovGame game = random_game(2, 2, {2, 2}, 3, 0.25, 41);
  AlgoConfig config = basic_config(12, 10);
  config.record_trace = true;
  const RunOutput out = run_robust_qftrl(game, config);
  REQUIRE(out.trace.has_value());
  REQUIRE(out.trace->full);

  const auto weights = out.schedules.weights();
  const double eff = effective_horizon(game);
  const int sum_a = game.sum_action_counts();

  for (int h = 0; h < game.horizon; ++h) {
    for (int i = 0; i < game.num_agents; ++i) {
      for (int s = 0; s < game.num_states; ++s) {
        const int a_count = game.action_counts[i];
        std::vector<double> q_acc(a_count, 0.0);
        std::vector<double> means(config.rounds), vars(config.rounds);
        for (int k = 1; k <= config.rounds; ++k) {
          const auto& q_round = out.trace->q_rounds[h][k - 1][i][s];
          const auto& pi_round = out.trace->pi_rounds[h][k - 1][i][s];
          const double alpha = out.schedules.alpha[k];
          double mean = 0.0, second = 0.0;
          for (int a = 0; a < a_count; ++a) {
            q_acc[a] = (1.0 - alpha) * q_acc[a] + alpha * q_round[a];
            mean += pi_round[a] * q_round[a];
            second += pi_round[a] * q_round[a] * q_round[a];
          }
          means[k - 1] = mean;
          vars[k - 1] = second - mean * mean;
        }
        for (int a = 0; a < a_count; ++a) {
          CHECK(q_acc[a] ==
                doctest::Approx(out.q_tables.values[i][h][s][a]).epsilon(1e-10));
        }
        const double beta =
            bonus_beta(vars, weights, config.effective_c_b(), config.delta,
                       config.rounds, game.num_states, sum_a, eff);
        CHECK(beta == doctest::Approx(out.trace->beta[i][h][s]).epsilon(1e-10));
        const double v = value_estimate(means, weights, beta, game.horizon - h);
        CHECK(v == doctest::Approx(out.values.values[i][h][s]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("trace thins to summaries past the memory cap") {
  const RobustMarkovGame game = random_game(1, 2, {2}, 2, 0.1, 42);
  AlgoConfig config = basic_config(16, 8);
  config.record_trace = true;
  config.trace_cap_doubles = 64;  // force thinning
  const RunOutput out = run_robust_qftrl(game, config);
  REQUIRE(out.trace.has_value());
  CHECK_FALSE(out.trace->full);
  CHECK(out.trace->q_rounds.empty());
  CHECK(out.trace->pi_rounds.empty());
  // Summaries stay available either way.
  REQUIRE(out.trace->beta.size() == 1);
  CHECK(out.trace->beta[0].size() == 2);
  for (int h = 0; h < 2; ++h) {
    for (int s = 0; s < 2; ++s) {
      const double v = value_estimate({&out.trace->weighted_mean[0][h][s], 1},
                                      {&kUnitWeight, 1},
                                      out.trace->beta[0][h][s], 2 - h);
      CHECK(v == doctest::Approx(out.values.values[0][h][s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("bonus_beta worked examples") {
  const Schedules sched = build_schedules(8, 24.0, 4, 0.5);
  const auto weights = sched.weights();
  const double eff = effective_horizon(4, 0.5);  // = 2

  const std::vector<double> zero_vars(8, 0.0);
  CHECK(bonus_beta(zero_vars, weights, 0.0, 0.01, 8, 3, 4, eff) == 0.0);

  // Constant q rows leave only the min{H,1/R} term: weights sum to 1, so the
  // bonus is exactly prefactor * eff.
  const double log_term = std::log(8.0 * 3 * 4 / 0.01);
  const double prefactor =
      0.5 * std::sqrt(log_term * log_term * log_term / (8.0 * eff));
  CHECK(bonus_beta(zero_vars, weights, 0.5, 0.01, 8, 3, 4, eff) ==
        doctest::Approx(prefactor * eff).epsilon(1e-12));

  // Doubling K rescales the 1/sqrt(K) prefactor (and its log term).
  const Schedules sched2 = build_schedules(16, 24.0, 4, 0.5);
  const std::vector<double> zero_vars2(16, 0.0);
  const double log_term2 = std::log(16.0 * 3 * 4 / 0.01);
  const double prefactor2 =
      0.5 * std::sqrt(log_term2 * log_term2 * log_term2 / (16.0 * eff));
  CHECK(bonus_beta(zero_vars2, sched2.weights(), 0.5, 0.01, 16, 3, 4, eff) ==
        doctest::Approx(prefactor2 * eff).epsilon(1e-12));
}

TEST_CASE("value_estimate worked examples") {
  const std::vector<double> means = {0.4};
  const std::vector<double> weights = {1.0};
  CHECK(value_estimate(means, weights, 1e9, 3) == doctest::Approx(3.0));
  CHECK(value_estimate(means, weights, 0.0, 3) == doctest::Approx(0.4));
}

TEST_CASE("theory constants raise c_b") {
  AlgoConfig config;
  config.c_alpha = 24.0;
  config.c_b = 0.5;
  CHECK(config.effective_c_b() == doctest::Approx(0.5));
  config.theory_constants = true;
  CHECK(config.effective_c_b() == doctest::Approx(2.0 * std::sqrt(25.0)));
}

TEST_CASE("zero-sum detection and product output") {
  RobustMarkovGame game = random_game(2, 2, {2, 2}, 2, 0.0, 55);
  CHECK_FALSE(is_zero_sum_encoded(game));
  make_zero_sum(game);
  CHECK(is_zero_sum_encoded(game));

  AlgoConfig config = basic_config(4, 2);
  const RunOutput out = run_robust_qftrl(game, config);
  REQUIRE(out.zero_sum_products.has_value());
  const auto& products = *out.zero_sum_products;
  REQUIRE(products.num_agents() == 2);

  // The averaged policy is the weight-combination of the stage policies.
  const auto weights = out.schedules.weights();
  for (int i = 0; i < 2; ++i) {
    for (int h = 0; h < game.horizon; ++h) {
      for (int s = 0; s < game.num_states; ++s) {
        for (int a = 0; a < 2; ++a) {
          double expected = 0.0;
          for (int k = 0; k < config.rounds; ++k) {
            expected += weights[k] * out.mixture.steps[h].components[k].dist[i][s][a];
          }
          CHECK(products.tables[i][h][s][a] ==
                doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("zero_sum_product_output refuses general-sum and m != 2 games") {
  RobustMarkovGame general = random_game(2, 2, {2, 2}, 2, 0.0, 56);
  AlgoConfig config = basic_config(2, 1);
  const RunOutput out = run_robust_qftrl(general, config);
  CHECK_FALSE(out.zero_sum_products.has_value());
  CHECK_THROWS_AS(zero_sum_product_output(general, out.mixture), ValidationError);

  RobustMarkovGame solo = random_game(1, 2, {2}, 2, 0.0, 57);
  const RunOutput solo_out = run_robust_qftrl(solo, config);
  CHECK_THROWS_AS(zero_sum_product_output(solo, solo_out.mixture), ValidationError);
}

TEST_CASE("single-round zero-sum output is the uniform stage pair") {
  RobustMarkovGame game = random_game(2, 2, {2, 3}, 2, 0.1, 58);
  make_zero_sum(game);
  AlgoConfig config = basic_config(1, 9);
  const RunOutput out = run_robust_qftrl(game, config);
  REQUIRE(out.zero_sum_products.has_value());
  for (int i = 0; i < 2; ++i) {
    const double uniform = 1.0 / game.action_counts[i];
    for (int h = 0; h < game.horizon; ++h) {
      for (int s = 0; s < game.num_states; ++s) {
        for (double x : out.zero_sum_products->tables[i][h][s]) {
          CHECK(x == doctest::Approx(uniform));
        }
      }
    }
  }
}

TEST_CASE("worst-case backup is non-increasing in R on fixed instances") {
  // Single-agent games so the keyed transition draws are identical across R
  // (no opponent draws whose realized values could shift with the policies).
  // The FTRL iterates still differ between runs, so pointwise dominance of
  // V-hat is not a universal law; these (game seed, algo seed) pairs are
  // fixed instances verified to satisfy it.
  const std::pair<std::uint64_t, std::uint64_t> pinned[] = {{2, 1}, {4, 2}, {5, 1}};
  for (const auto& [game_seed, algo_seed] : pinned) {
    const RobustMarkovGame base = random_game(1, 3, {2}, 4, 0.0, game_seed);
    std::vector<double> prev;
    for (double r : {0.0, 0.25, 0.5, 0.75}) {
      RobustMarkovGame game = base;
      game.uncertainty_level = r;
      AlgoConfig config = basic_config(64, algo_seed, /*c_b=*/0.0);
      const RunOutput out = run_robust_qftrl(game, config);
      const std::vector<double>& v1 = out.values.values[0][0];
      if (!prev.empty()) {
        for (int s = 0; s < 3; ++s) CHECK(v1[s] <= prev[s] + 1e-12);
      }
      prev = v1;
    }
  }
}

TEST_CASE("value tables satisfy their invariants after a run") {
  const RobustMarkovGame game = random_game(2, 3, {2, 2}, 5, 0.3, 71);
  AlgoConfig config = basic_config(32, 4);
  const RunOutput out = run_robust_qftrl(game, config);
  CHECK(out.checks.invariant_violations == 0);

  for (int i = 0; i < game.num_agents; ++i) {
    for (int s = 0; s < game.num_states; ++s) {
      CHECK(out.values.values[i][game.horizon][s] == 0.0);
    }
    for (int h = 0; h < game.horizon; ++h) {
      double row_min = out.values.values[i][h][0];
      double next_min = out.values.values[i][h + 1][0];
      for (int s = 0; s < game.num_states; ++s) {
        const double v = out.values.values[i][h][s];
        CHECK(v >= 0.0);
        CHECK(v <= game.horizon - h);
        row_min = std::min(row_min, v);
        next_min = std::min(next_min, out.values.values[i][h + 1][s]);
      }
      CHECK(row_min >= next_min - 1e-12);
    }
  }

  // Every mixture component row is strictly positive and stochastic.
  for (const auto& step : out.mixture.steps) {
    for (const auto& comp : step.components) {
      for (const auto& table : comp.dist) {
        for (const auto& row : table) {
          double sum = 0.0;
          for (double x : row) {
            CHECK(x > 0.0);
            sum += x;
          }
          CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
      }
    }
  }
}
