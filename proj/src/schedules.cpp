#include "rmg/schedules.hpp"

#include <algorithm>
#include <cmath>

#include "rmg/game.hpp"

namespace rmg {

Schedules build_schedules(int rounds, double c_alpha, int horizon,
                          double uncertainty_level) {
  if (rounds < 1) throw ValidationError("round count K must be >= 1");
  if (!(c_alpha > 0.0)) throw ValidationError("c_alpha must be > 0");

  const int K = rounds;
  const double eff = effective_horizon(horizon, uncertainty_level);
  const double log_k = std::log(static_cast<double>(K));

  Schedules s;
  s.rounds = K;
  s.c_alpha = c_alpha;
  s.alpha.assign(K + 2, 0.0);
  s.eta.assign(K + 2, 0.0);
  s.alpha_K.assign(K + 1, 0.0);

  s.alpha[1] = 1.0;
  for (int k = 2; k <= K + 1; ++k) {
    s.alpha[k] = c_alpha * log_k / (k - 1 + c_alpha * log_k);
  }
  if (K == 1) {
    s.eta[2] = 1.0;  // degenerate single-round run; never consumed
  } else {
    for (int k = 2; k <= K + 1; ++k) {
      s.eta[k] = std::sqrt(log_k / (s.alpha[k] * eff));
    }
  }

  double suffix = 1.0;  // prod_{j=k+1..K} (1 - alpha[j])
  for (int k = K; k >= 1; --k) {
    s.alpha_K[k] = s.alpha[k] * suffix;
    suffix *= 1.0 - s.alpha[k];
  }
  return s;
}

void ftrl_update_into(std::span<const double> q_row, double eta,
                      std::span<double> out) {
  double qmax = q_row[0];
  for (double q : q_row) qmax = std::max(qmax, q);
  double total = 0.0;
  for (std::size_t a = 0; a < q_row.size(); ++a) {
    out[a] = std::exp(eta * (q_row[a] - qmax));
    total += out[a];
  }
  for (std::size_t a = 0; a < q_row.size(); ++a) out[a] /= total;
}

std::vector<double> ftrl_update(std::span<const double> q_row, double eta) {
  std::vector<double> out(q_row.size());
  ftrl_update_into(q_row, eta, out);
  return out;
}

}  // namespace rmg
