#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rmg/game.hpp"
#include "rmg/schedules.hpp"

using namespace rmg;

TEST_CASE("K=1 puts all mixture weight on the single round") {
  const Schedules s = build_schedules(1, 24.0, 5, 0.1);
  REQUIRE(s.weights().size() == 1);
  CHECK(s.weights()[0] == doctest::Approx(1.0));
  CHECK(s.eta[2] == doctest::Approx(1.0));
}

TEST_CASE("K=0 rejected") {
  CHECK_THROWS_AS(build_schedules(0, 24.0, 5, 0.0), ValidationError);
}

TEST_CASE("mixture weights sum to one") {
  for (int K : {1, 2, 10, 100, 1000}) {
    for (double c_alpha : {1.0, 24.0}) {
      const Schedules s = build_schedules(K, c_alpha, 8, 0.2);
      const auto w = s.weights();
      const double sum = std::accumulate(w.begin(), w.end(), 0.0);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("alpha_1 is 1 and later alphas are in (0,1)") {
  const Schedules s = build_schedules(50, 24.0, 4, 0.0);
  CHECK(s.alpha[1] == 1.0);
  for (int k = 2; k <= 50; ++k) {
    CHECK(s.alpha[k] > 0.0);
    CHECK(s.alpha[k] < 1.0);
  }
}

TEST_CASE("weight tail bounds at K=1000, c_alpha=24") {
  const int K = 1000;
  const double c_alpha = 24.0;
  REQUIRE(K >= c_alpha * std::log(K) + 1);  // lemma precondition
  const Schedules s = build_schedules(K, c_alpha, 8, 0.2);
  const auto w = s.weights();

  double max_all = 0.0, max_first_half = 0.0;
  for (int k = 1; k <= K; ++k) {
    max_all = std::max(max_all, w[k - 1]);
    if (k <= K / 2) max_first_half = std::max(max_first_half, w[k - 1]);
  }
  CHECK(max_all <= 2.0 * c_alpha * std::log(K) / K);
  CHECK(max_first_half <= std::pow(static_cast<double>(K), -6.0) * (1.0 + 1e-9));
}

TEST_CASE("eta schedule satisfies the FTRL step condition") {
  // eta_{k+1} (1 - alpha_k) <= eta_k for k >= 2, over (K, H, R) grids.
  for (int K : {3, 10, 100, 1000}) {
    for (int H : {1, 4, 16}) {
      for (double R : {0.0, 0.1, 0.5, 0.9}) {
        const Schedules s = build_schedules(K, 24.0, H, R);
        for (int k = 2; k <= K; ++k) {
          CHECK(s.eta[k + 1] * (1.0 - s.alpha[k]) <= s.eta[k] * (1.0 + 1e-12));
          CHECK(s.eta[k] > 0.0);
        }
      }
    }
  }
}

TEST_CASE("ftrl softmax on worked examples") {
  const std::vector<double> zeros = {0.0, 0.0, 0.0, 0.0};
  for (double eta : {0.0, 1.0, 50.0}) {
    const auto out = ftrl_update(zeros, eta);
    for (double x : out) CHECK(x == doctest::Approx(0.25).epsilon(1e-12));
  }

  const std::vector<double> row = {1.3, -0.4};
  const auto uniform = ftrl_update(row, 0.0);
  CHECK(uniform[0] == doctest::Approx(0.5));
  CHECK(uniform[1] == doctest::Approx(0.5));

  const std::vector<double> log3 = {0.0, std::log(3.0)};
  const auto skewed = ftrl_update(log3, 1.0);
  CHECK(skewed[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(skewed[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("ftrl softmax is shift invariant and permutation equivariant") {
  const RandomStream stream(5);
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    std::vector<double> row(4);
    for (int a = 0; a < 4; ++a) {
      StreamKey key = StreamKey::tagged(StreamTag::kTestAux, 20);
      key.at(trial, a);
      row[a] = 10.0 * stream.uniform(key) - 5.0;
    }
    const double eta = 0.8;
    const auto base = ftrl_update(row, eta);

    std::vector<double> shifted = row;
    for (double& x : shifted) x += 3.7;
    const auto shifted_out = ftrl_update(shifted, eta);
    for (int a = 0; a < 4; ++a) {
      CHECK(shifted_out[a] == doctest::Approx(base[a]).epsilon(1e-12));
    }

    std::vector<double> reversed(row.rbegin(), row.rend());
    const auto reversed_out = ftrl_update(reversed, eta);
    for (int a = 0; a < 4; ++a) {
      CHECK(reversed_out[a] == doctest::Approx(base[3 - a]).epsilon(1e-12));
    }

    double sum = 0.0;
    for (double x : base) {
      CHECK(x > 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}
