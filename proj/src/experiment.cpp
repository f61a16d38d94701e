#include "rmg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "rmg/eval.hpp"
#include "rmg/serialize.hpp"

namespace rmg {

namespace {

using nlohmann::json;

RobustMarkovGame load_base_game(const ExperimentConfig& config) {
  if (config.game_path.has_value() == config.generator.has_value()) {
    throw ValidationError("config must name exactly one of game path or generator");
  }
  if (config.game_path) return game_from_json(read_file(*config.game_path));
  return generate_random_game(*config.generator);
}

}  // namespace

std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

RobustMarkovGame generate_random_game(const RandomGameSpec& spec) {
  RobustMarkovGame game;
  game.num_agents = spec.num_agents;
  game.num_states = spec.num_states;
  game.action_counts = spec.action_counts;
  game.horizon = spec.horizon;
  game.uncertainty_level = spec.uncertainty_level;
  game.indexer = JointActionIndexer(spec.action_counts);

  const std::int64_t joint = game.indexer.num_joint();
  if (joint > kMaxJointActions) {
    throw ValidationError("joint action space exceeds dense-storage cap");
  }
  const int S = spec.num_states;
  const int H = spec.horizon;
  const RandomStream stream(spec.seed);

  game.kernel.assign(static_cast<std::size_t>(H) * S * joint * S, 0.0);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (std::int64_t j = 0; j < joint; ++j) {
        double* row = game.kernel.data() +
                      ((static_cast<std::int64_t>(h) * S + s) * joint + j) * S;
        double sum = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          StreamKey key = StreamKey::tagged(StreamTag::kKernelGen, static_cast<std::uint64_t>(sp));
          key.at(h, j, 0, s);
          // Shift off zero so normalization never divides by zero.
          row[sp] = stream.uniform(key) + 1e-12;
          sum += row[sp];
        }
        for (int sp = 0; sp < S; ++sp) row[sp] /= sum;
      }
    }
  }

  game.rewards.assign(static_cast<std::size_t>(spec.num_agents) * H * S * joint, 0.0);
  for (int i = 0; i < spec.num_agents; ++i) {
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (std::int64_t j = 0; j < joint; ++j) {
          StreamKey key = StreamKey::tagged(StreamTag::kRewardGen, static_cast<std::uint64_t>(i));
          key.at(h, j, 0, s);
          game.reward_ref(i, h, s, j) = stream.uniform(key);
        }
      }
    }
  }
  validate(game);
  return game;
}

double theta_recovery_stat(const std::vector<int>& theta,
                           const MixturePolicy& mixture) {
  const int H = static_cast<int>(theta.size());
  if (mixture.horizon() != H) {
    throw ValidationError("mixture horizon does not match theta length");
  }
  int recovered = 0;
  for (int h = 0; h < H; ++h) {
    const auto& step = mixture.steps[h];
    double on_theta = 0.0, off_theta = 0.0;
    for (std::size_t k = 0; k < step.components.size(); ++k) {
      on_theta += step.weights[k] * step.components[k].dist[0][0][theta[h]];
      off_theta += step.weights[k] * step.components[k].dist[0][0][1 - theta[h]];
    }
    if (on_theta > off_theta) ++recovered;
  }
  return static_cast<double>(recovered) / H;
}

namespace {

SweepRow run_cell(const RobustMarkovGame& base, const ExperimentConfig& config,
                  int rounds, double uncertainty, std::uint64_t seed) {
  SweepRow row;
  row.rounds = rounds;
  row.uncertainty_level = uncertainty;
  row.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    RobustMarkovGame game = base;
    game.uncertainty_level = uncertainty;
    validate(game);

    AlgoConfig algo;
    algo.rounds = rounds;
    algo.c_alpha = config.c_alpha;
    algo.c_b = config.c_b;
    algo.delta = config.delta;
    algo.theory_constants = config.theory_constants;
    algo.seed = seed;

    const RunOutput output = run_robust_qftrl(game, algo);
    row.sample_count = output.sample_count;
    if (output.checks.invariant_violations > 0) {
      throw ValidationError("runtime invariant violations: " +
                            std::to_string(output.checks.invariant_violations));
    }

    const GapReport cce = cce_gap(game, output.mixture);
    row.cce_gap = cce.max_gap;
    row.per_agent_max_gap = cce.per_agent_max;
    if (output.zero_sum_products) {
      const GapReport ne = ne_gap(game, *output.zero_sum_products);
      row.ne_gap = ne.max_gap;
    } else if (game.num_agents == 1) {
      const GapReport ne = ne_gap(game, average_to_product(output.mixture));
      row.ne_gap = ne.max_gap;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  if (config.record_timings) {
    row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  if (config.rounds_grid.empty() || config.uncertainty_grid.empty() ||
      config.seeds.empty()) {
    throw ValidationError("sweep grid must be non-empty in K, R and seeds");
  }
  for (int k : config.rounds_grid) {
    if (k < 1) throw ValidationError("every K in the grid must be >= 1");
  }
  for (double r : config.uncertainty_grid) {
    if (r < 0.0 || r >= 1.0) {
      throw ValidationError("every R in the grid must be in [0,1)");
    }
  }

  const RobustMarkovGame base = load_base_game(config);

  struct Cell {
    int rounds;
    double uncertainty;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int k : config.rounds_grid) {
    for (double r : config.uncertainty_grid) {
      for (std::uint64_t seed : config.seeds) cells.push_back({k, r, seed});
    }
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.rounds, a.uncertainty, a.seed) <
           std::tie(b.rounds, b.uncertainty, b.seed);
  });

  std::vector<SweepRow> rows(cells.size());
  const int workers = std::max(1, config.parallelism);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) break;
      const Cell& cell = cells[idx];
      rows[idx] = run_cell(base, config, cell.rounds, cell.uncertainty, cell.seed);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepCsvHeader << "\n";
  for (const auto& row : rows) {
    out << row.rounds << ',' << format_double(row.uncertainty_level) << ','
        << row.seed << ',';
    if (row.error.empty()) {
      out << format_double(row.cce_gap) << ',';
      if (row.ne_gap) out << format_double(*row.ne_gap);
      out << ',';
      for (std::size_t i = 0; i < row.per_agent_max_gap.size(); ++i) {
        if (i > 0) out << ';';
        out << format_double(row.per_agent_max_gap[i]);
      }
      out << ',' << row.wall_time_ms << ',' << row.sample_count << ',';
    } else {
      std::string sanitized = row.error;
      for (char& c : sanitized) {
        if (c == ',' || c == '\n') c = ';';
      }
      out << ",,," << row.wall_time_ms << ',' << row.sample_count << ','
          << sanitized;
    }
    out << "\n";
  }
  return out.str();
}

ExperimentConfig experiment_config_from_json(const std::string& text,
                                             double default_c_alpha,
                                             double default_c_b,
                                             double default_delta) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid sweep config JSON: ") + e.what());
  }
  ExperimentConfig config;
  if (doc.contains("game")) config.game_path = doc.at("game").get<std::string>();
  if (doc.contains("generator")) {
    const auto& g = doc.at("generator");
    RandomGameSpec spec;
    spec.num_agents = g.at("num_agents").get<int>();
    spec.num_states = g.at("num_states").get<int>();
    spec.action_counts = g.at("action_counts").get<std::vector<int>>();
    spec.horizon = g.at("horizon").get<int>();
    spec.uncertainty_level = g.value("uncertainty_level", 0.0);
    spec.seed = g.at("seed").get<std::uint64_t>();
    config.generator = spec;
  }
  config.rounds_grid = doc.at("rounds").get<std::vector<int>>();
  config.uncertainty_grid = doc.at("uncertainty_levels").get<std::vector<double>>();
  config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  config.c_alpha = doc.value("c_alpha", default_c_alpha);
  config.c_b = doc.value("c_b", default_c_b);
  config.delta = doc.value("delta", default_delta);
  config.theory_constants = doc.value("theory_constants", false);
  config.parallelism = doc.value("parallelism", 1);
  config.record_timings = doc.value("record_timings", false);
  config.output_path = doc.value("output", "");
  return config;
}

}  // namespace rmg
