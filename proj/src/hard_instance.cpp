#include "rmg/hard_instance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rmg {

HardInstanceParams HardInstanceParams::make(int horizon, double uncertainty_level,
                                            double epsilon, double c, double c1) {
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  if (uncertainty_level < 0.0 || uncertainty_level >= 1.0) {
    throw ValidationError("uncertainty level must be in [0,1)");
  }
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(c > 0.0 && c <= 0.75)) throw ValidationError("c must be in (0, 3/4]");
  if (!(c1 > 0.0)) throw ValidationError("c1 must be > 0");

  HardInstanceParams params;
  params.horizon = horizon;
  params.uncertainty_level = uncertainty_level;
  params.epsilon = epsilon;
  params.c = c;
  params.c1 = c1;

  const double eff = effective_horizon(horizon, uncertainty_level);
  params.p = c * std::max(1.0 / horizon, uncertainty_level);
  params.delta_gap = c1 * epsilon / (horizon * eff);
  params.q = params.p - params.delta_gap;
  params.p_tilde = (1.0 - uncertainty_level) * params.p;

  if (!(params.q > 0.0)) {
    throw ValidationError("hard-instance parameters give q = p - Delta <= 0 "
                          "(epsilon or c1 too large)");
  }
  if (!(params.q < params.p)) {
    throw ValidationError("hard-instance parameters give Delta <= 0");
  }
  if (params.p > 0.75) {
    throw ValidationError("hard-instance parameters give p > 3/4");
  }
  return params;
}

RobustMarkovGame hard_rmdp(const HardInstanceParams& params,
                           const std::vector<int>& theta) {
  const int H = params.horizon;
  if (static_cast<int>(theta.size()) != H) {
    throw ValidationError("theta length must equal the horizon");
  }
  for (int bit : theta) {
    if (bit != 0 && bit != 1) throw ValidationError("theta entries must be bits");
  }

  RobustMarkovGame game;
  game.num_agents = 1;
  game.num_states = 2;
  game.action_counts = {2};
  game.horizon = H;
  game.uncertainty_level = params.uncertainty_level;
  game.indexer = JointActionIndexer(game.action_counts);
  game.kernel.assign(static_cast<std::size_t>(H) * 2 * 2 * 2, 0.0);
  game.rewards.assign(static_cast<std::size_t>(H) * 2 * 2, 0.0);

  auto kernel_at = [&](int h, int s, int a) -> double* {
    return game.kernel.data() + (((static_cast<std::int64_t>(h) * 2 + s) * 2 + a) * 2);
  };
  for (int h = 0; h < H; ++h) {
    double* good = kernel_at(h, 0, theta[h]);
    good[0] = 1.0 - params.p;
    good[1] = params.p;
    double* bad = kernel_at(h, 0, 1 - theta[h]);
    bad[0] = 1.0 - params.q;
    bad[1] = params.q;
    for (int a = 0; a < 2; ++a) {
      double* absorb = kernel_at(h, 1, a);
      absorb[0] = 0.0;
      absorb[1] = 1.0;
    }
    for (int a = 0; a < 2; ++a) {
      game.reward_ref(0, h, 1, a) = 1.0;
    }
  }
  validate(game);
  return game;
}

std::pair<double, double> closed_form_optimal_value(double p,
                                                    double uncertainty_level,
                                                    int horizon, int h) {
  if (h < 1 || h > horizon + 1) throw ValidationError("h out of range [1, H+1]");
  if (h == horizon + 1) return {0.0, 0.0};
  const double R = uncertainty_level;
  const double p_tilde = (1.0 - R) * p;
  const double denom = R + p_tilde;
  if (!(denom > 0.0)) throw ValidationError("R + (1-R)p must be positive");
  const int remaining = horizon - h + 1;
  const double geometric =
      (1.0 - std::pow(1.0 - R - p_tilde, remaining)) / denom;
  const double v0 = p_tilde / denom * (remaining - geometric);
  const double v1 = (p_tilde * remaining + R * geometric) / denom;
  return {v0, v1};
}

std::pair<double, double> closed_form_optimal_value(const HardInstanceParams& params,
                                                    int h) {
  return closed_form_optimal_value(params.p, params.uncertainty_level,
                                   params.horizon, h);
}

std::vector<std::vector<int>> gilbert_varshamov_pack(int horizon,
                                                     int max_attempts,
                                                     const RandomStream& stream) {
  if (horizon < 8) throw ValidationError("packing requires horizon >= 8");
  const int min_distance = (horizon + 7) / 8;  // ceil(H/8)

  std::vector<std::vector<int>> kept;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<int> theta(horizon);
    for (int h = 0; h < horizon; ++h) {
      StreamKey key = StreamKey::tagged(StreamTag::kThetaPack);
      key.at(h, attempt);
      theta[h] = stream.uniform(key) < 0.5 ? 0 : 1;
    }
    bool far_enough = true;
    for (const auto& other : kept) {
      int distance = 0;
      for (int h = 0; h < horizon; ++h) distance += theta[h] != other[h];
      if (distance < min_distance) {
        far_enough = false;
        break;
      }
    }
    if (far_enough) kept.push_back(std::move(theta));
  }
  return kept;
}

ProductMarkovPolicy optimal_theta_policy(const std::vector<int>& theta) {
  const int H = static_cast<int>(theta.size());
  ProductMarkovPolicy policy;
  policy.tables.resize(1);
  policy.tables[0].resize(H);
  for (int h = 0; h < H; ++h) {
    policy.tables[0][h].assign(2, std::vector<double>(2, 0.0));
    policy.tables[0][h][0][theta[h]] = 1.0;
    policy.tables[0][h][1][0] = 1.0;
  }
  return policy;
}

}  // namespace rmg
