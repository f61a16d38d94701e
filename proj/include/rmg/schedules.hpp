#pragma once

#include <span>
#include <vector>

namespace rmg {

// Learning-rate schedules for one Q-FTRL run. Vectors are 1-based: entry [k]
// holds the round-k value and entry [0] is unused, mirroring the round index.
//
//   alpha[1] = 1,  alpha[k] = c_alpha log K / (k - 1 + c_alpha log K)
//   eta[k]   = sqrt(log K / (alpha[k] min{H, 1/R}))   for k = 2..K+1
//   alpha_K[k] = alpha[k] prod_{j=k+1..K} (1 - alpha[j]),  sums to 1.
struct Schedules {
  int rounds = 0;  // K
  double c_alpha = 24.0;
  std::vector<double> alpha;    // [0..K], alpha[0] unused
  std::vector<double> eta;      // [0..K+1], eta[0..1] unused
  std::vector<double> alpha_K;  // [0..K], alpha_K[0] unused

  // Mixture weights as a 0-based span: element k-1 is alpha_k^K.
  std::span<const double> weights() const { return {alpha_K.data() + 1, static_cast<std::size_t>(rounds)}; }
};

// Builds the Theorem-1 schedules. K=1 is degenerate (log 1 = 0): alpha_1 = 1
// carries all weight and eta_2 is pinned to 1, which no update ever consumes.
Schedules build_schedules(int rounds, double c_alpha, int horizon,
                          double uncertainty_level);

// FTRL softmax step: softmax(eta * q_row), computed with max subtraction.
// Output rows are strictly positive.
std::vector<double> ftrl_update(std::span<const double> q_row, double eta);
void ftrl_update_into(std::span<const double> q_row, double eta,
                      std::span<double> out);

}  // namespace rmg
