#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rmg/game.hpp"
#include "rmg/policy.hpp"

namespace rmg {

// Parameters of the two-state lower-bound RMDP family. Derived quantities:
//   p = c max{1/H, R},  Delta = c1 eps / (H min{H, 1/R}),  q = p - Delta,
//   p_tilde = (1 - R) p.
// Construction requires 0 < q < p <= 3/4 (p = 3/4 occurs only at H = 1 with
// the default c; the H >= 16 regime keeps the strict form).
struct HardInstanceParams {
  int horizon = 0;
  double uncertainty_level = 0.0;
  double epsilon = 0.0;
  double c = 0.75;
  double c1 = 1.0;

  double p = 0.0;
  double q = 0.0;
  double delta_gap = 0.0;  // Delta = p - q
  double p_tilde = 0.0;

  static HardInstanceParams make(int horizon, double uncertainty_level,
                                 double epsilon, double c = 0.75,
                                 double c1 = 1.0);
};

// Single-agent game over states {0,1} and two actions: at state 0 the
// theta_h action reaches state 1 with probability p, the other with q;
// state 1 absorbs under the nominal kernel; reward 1 iff s = 1.
RobustMarkovGame hard_rmdp(const HardInstanceParams& params,
                           const std::vector<int>& theta);

// Closed-form optimal robust value (V*_h(0), V*_h(1)); h is 1-based with
// h = H+1 giving (0, 0).
std::pair<double, double> closed_form_optimal_value(double p,
                                                    double uncertainty_level,
                                                    int horizon, int h);
std::pair<double, double> closed_form_optimal_value(const HardInstanceParams& params,
                                                    int h);

// Greedy randomized Gilbert-Varshamov packing: uniform theta draws kept when
// at Hamming distance >= ceil(H/8) from everything already kept. The
// e^{H/8} size guarantee is existential; the greedy set's size is reported,
// not certified.
std::vector<std::vector<int>> gilbert_varshamov_pack(int horizon,
                                                     int max_attempts,
                                                     const RandomStream& stream);

// Deterministic policy playing theta_h at state 0 (action 0 at state 1).
ProductMarkovPolicy optimal_theta_policy(const std::vector<int>& theta);

}  // namespace rmg
