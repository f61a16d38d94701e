#include <vector>

#include "doctest.h"
#include "rmg/policy.hpp"
#include "test_support.hpp"

using namespace rmg;
using rmg::testing::random_game;
using rmg::testing::random_mixture;

namespace {

MixturePolicy two_agent_uniform_single() {
  MixturePolicy mix;
  mix.steps.resize(1);
  StageProduct comp;
  comp.dist = {{{0.5, 0.5}}, {{0.5, 0.5}}};  // one state, two agents
  mix.steps[0].weights = {1.0};
  mix.steps[0].components = {comp};
  return mix;
}

}  // namespace

TEST_CASE("joint distribution of a single uniform product") {
  const MixturePolicy mix = two_agent_uniform_single();
  const JointActionIndexer indexer({2, 2});
  const auto dist = joint_action_distribution(mix, indexer, 0, 0);
  REQUIRE(dist.size() == 4);
  for (double x : dist) CHECK(x == doctest::Approx(0.25));
}

TEST_CASE("mixture of deterministic products is a two-atom distribution") {
  MixturePolicy mix;
  mix.steps.resize(1);
  StageProduct first, second;
  first.dist = {{{1.0, 0.0}}, {{1.0, 0.0}}};   // joint action (0,0)
  second.dist = {{{0.0, 1.0}}, {{0.0, 1.0}}};  // joint action (1,1)
  mix.steps[0].weights = {0.3, 0.7};
  mix.steps[0].components = {first, second};

  const JointActionIndexer indexer({2, 2});
  const auto dist = joint_action_distribution(mix, indexer, 0, 0);
  CHECK(dist[0] == doctest::Approx(0.3));
  CHECK(dist[1] == doctest::Approx(0.0));
  CHECK(dist[2] == doctest::Approx(0.0));
  CHECK(dist[3] == doctest::Approx(0.7));
}

TEST_CASE("joint distribution matches direct component summation") {
  const RobustMarkovGame game = random_game(3, 2, {2, 3, 2}, 2, 0.1, 77);
  const MixturePolicy mix = random_mixture(game, 3, 123);
  for (int h = 0; h < game.horizon; ++h) {
    for (int s = 0; s < game.num_states; ++s) {
      const auto dist = joint_action_distribution(mix, game.indexer, h, s);
      double total = 0.0;
      std::vector<int> actions(3);
      for (std::int64_t j = 0; j < game.indexer.num_joint(); ++j) {
        game.indexer.decode(j, actions);
        double expected = 0.0;
        for (std::size_t k = 0; k < mix.steps[h].components.size(); ++k) {
          double prob = mix.steps[h].weights[k];
          for (int i = 0; i < 3; ++i) {
            prob *= mix.steps[h].components[k].dist[i][s][actions[i]];
          }
          expected += prob;
        }
        CHECK(dist[j] == doctest::Approx(expected).epsilon(1e-12));
        total += dist[j];
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("marginal excluding the only agent is a unit atom") {
  const RobustMarkovGame game = random_game(1, 2, {3}, 2, 0.0, 5);
  const MixturePolicy mix = random_mixture(game, 2, 9);
  const auto marginal = marginal_excluding(mix, game.indexer, 0, 0, 0);
  REQUIRE(marginal.size() == 1);
  CHECK(marginal[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("marginal excluding matches summing out the agent from the joint") {
  const RobustMarkovGame game = random_game(3, 2, {2, 2, 3}, 1, 0.0, 31);
  const MixturePolicy mix = random_mixture(game, 2, 32);
  const int excluded = 1;

  const auto marginal = marginal_excluding(mix, game.indexer, 0, 1, excluded);
  const auto joint = joint_action_distribution(mix, game.indexer, 0, 1);

  std::vector<double> summed(game.indexer.num_excluding(excluded), 0.0);
  std::vector<int> actions(3);
  for (std::int64_t j = 0; j < game.indexer.num_joint(); ++j) {
    game.indexer.decode(j, actions);
    std::int64_t sub = 0;
    for (int i = 0; i < 3; ++i) {
      if (i == excluded) continue;
      sub = sub * game.indexer.count(i) + actions[i];
    }
    summed[sub] += joint[j];
  }
  double total = 0.0;
  for (std::size_t idx = 0; idx < summed.size(); ++idx) {
    CHECK(marginal[idx] == doctest::Approx(summed[idx]).epsilon(1e-10));
    total += marginal[idx];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("single-component marginal is the plain product of the others") {
  const MixturePolicy mix = two_agent_uniform_single();
  const JointActionIndexer indexer({2, 2});
  const auto marginal = marginal_excluding(mix, indexer, 0, 0, 0);
  REQUIRE(marginal.size() == 2);
  CHECK(marginal[0] == doctest::Approx(0.5));
  CHECK(marginal[1] == doctest::Approx(0.5));
}

TEST_CASE("average_agent_policy worked examples") {
  using Rows = std::vector<std::vector<std::vector<double>>>;

  const Rows identity = {{{0.2, 0.8}}};
  const std::vector<double> one = {1.0};
  const auto same = average_agent_policy(identity, one);
  CHECK(same[0][0] == doctest::Approx(0.2));
  CHECK(same[0][1] == doctest::Approx(0.8));

  const Rows uniforms = {{{0.5, 0.5}}, {{0.5, 0.5}}};
  const std::vector<double> half = {0.5, 0.5};
  const auto still_uniform = average_agent_policy(uniforms, half);
  CHECK(still_uniform[0][0] == doctest::Approx(0.5));

  const Rows deterministic = {{{1.0, 0.0}}, {{0.0, 1.0}}};
  const auto mixed = average_agent_policy(deterministic, half);
  CHECK(mixed[0][0] == doctest::Approx(0.5));
  CHECK(mixed[0][1] == doctest::Approx(0.5));
}

TEST_CASE("policy validation catches bad rows and weights") {
  MixturePolicy mix = two_agent_uniform_single();
  CHECK_NOTHROW(validate(mix));
  mix.steps[0].weights = {0.9};
  CHECK_THROWS_AS(validate(mix), ValidationError);

  MixturePolicy bad_row = two_agent_uniform_single();
  bad_row.steps[0].components[0].dist[0][0] = {0.7, 0.7};
  CHECK_THROWS_AS(validate(bad_row), ValidationError);
}
