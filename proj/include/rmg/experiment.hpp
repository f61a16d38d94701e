#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmg/game.hpp"
#include "rmg/policy.hpp"
#include "rmg/qftrl.hpp"

namespace rmg {

// Generator spec: kernel rows from normalized independent uniforms, rewards
// uniform in [0,1]; fully determined by the seed.
struct RandomGameSpec {
  int num_agents = 1;
  int num_states = 1;
  std::vector<int> action_counts;
  int horizon = 1;
  double uncertainty_level = 0.0;
  std::uint64_t seed = 0;
};

RobustMarkovGame generate_random_game(const RandomGameSpec& spec);

struct ExperimentConfig {
  std::optional<std::string> game_path;      // exactly one source: path or spec
  std::optional<RandomGameSpec> generator;
  std::vector<int> rounds_grid;              // K values
  std::vector<double> uncertainty_grid;      // R values (override the game's R)
  std::vector<std::uint64_t> seeds;
  double c_alpha = 24.0;
  double c_b = 0.5;
  double delta = 0.01;
  bool theory_constants = false;
  int parallelism = 1;
  bool record_timings = false;  // timings break byte-reproducibility; off by default
  std::string output_path;
};

struct SweepRow {
  int rounds = 0;
  double uncertainty_level = 0.0;
  std::uint64_t seed = 0;
  double cce_gap = 0.0;
  std::optional<double> ne_gap;
  std::vector<double> per_agent_max_gap;
  std::int64_t wall_time_ms = 0;
  std::int64_t sample_count = 0;
  std::string error;  // empty on success
};

inline constexpr const char* kSweepCsvHeader =
    "K,R,seed,cce_gap,ne_gap,max_agent_gap,wall_time_ms,sample_count,error";

// Runs solve + exact evaluation on every (K, R, seed) cell with a bounded
// worker pool; rows come back ordered by (K, R, seed) regardless of the
// schedule. Per-cell failures land in the error column.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows);

// Defaults apply only when the document omits the field (the CLI passes
// env-derived defaults here).
ExperimentConfig experiment_config_from_json(const std::string& text,
                                             double default_c_alpha = 24.0,
                                             double default_c_b = 0.5,
                                             double default_delta = 0.01);

// Fraction of steps whose mixture state-0 marginal puts strictly more mass
// on theta_h than on 1 - theta_h; ties count as failures.
double theta_recovery_stat(const std::vector<int>& theta,
                           const MixturePolicy& mixture);

// 17-significant-digit float formatting shared by CSV and reports.
std::string format_double(double x);

}  // namespace rmg
