#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rmg/eval.hpp"
#include "rmg/experiment.hpp"
#include "rmg/game.hpp"
#include "rmg/hard_instance.hpp"
#include "rmg/qftrl.hpp"
#include "rmg/serialize.hpp"

namespace {

double env_or(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  try {
    return std::stod(raw);
  } catch (const std::exception&) {
    throw rmg::ValidationError(std::string("cannot parse env var ") + name);
  }
}

std::vector<int> parse_theta(const std::string& bits) {
  std::vector<int> theta;
  theta.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw rmg::ValidationError("--theta must be a string of 0/1 bits");
    }
    theta.push_back(c - '0');
  }
  return theta;
}

std::vector<int> random_theta(int horizon, std::uint64_t seed) {
  const rmg::RandomStream stream(seed);
  std::vector<int> theta(horizon);
  for (int h = 0; h < horizon; ++h) {
    rmg::StreamKey key = rmg::StreamKey::tagged(rmg::StreamTag::kThetaPack);
    key.at(h);
    theta[h] = stream.uniform(key) < 0.5 ? 0 : 1;
  }
  return theta;
}

std::string closed_form_csv(const rmg::HardInstanceParams& params) {
  std::string out = "h,v_star_0,v_star_1\n";
  for (int h = 1; h <= params.horizon + 1; ++h) {
    const auto [v0, v1] = rmg::closed_form_optimal_value(params, h);
    out += std::to_string(h) + ',' + rmg::format_double(v0) + ',' +
           rmg::format_double(v1) + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular solver and evaluator for finite-horizon robust Markov "
               "games under R-contamination uncertainty"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a random game");
  rmg::RandomGameSpec gen_spec;
  std::string gen_out;
  generate->add_option("--agents", gen_spec.num_agents)->required();
  generate->add_option("--states", gen_spec.num_states)->required();
  generate->add_option("--actions", gen_spec.action_counts,
                       "Per-agent action counts")->required();
  generate->add_option("--horizon", gen_spec.horizon)->required();
  generate->add_option("--uncertainty", gen_spec.uncertainty_level);
  generate->add_option("--seed", gen_spec.seed);
  generate->add_option("--out", gen_out)->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Run robust Q-FTRL on a game");
  std::string solve_game, solve_out, solve_trace;
  rmg::AlgoConfig algo;
  algo.c_alpha = env_or("RMG_C_ALPHA", 24.0);
  algo.c_b = env_or("RMG_C_B", 0.5);
  algo.delta = env_or("RMG_DELTA", 0.01);
  solve->add_option("--game", solve_game)->required();
  solve->add_option("--rounds", algo.rounds)->required();
  solve->add_option("--seed", algo.seed);
  solve->add_option("--c-alpha", algo.c_alpha);
  solve->add_option("--c-b", algo.c_b);
  solve->add_option("--delta", algo.delta);
  solve->add_flag("--theory-constants", algo.theory_constants,
                  "Use c_b = 2 sqrt(c_alpha + 1)");
  solve->add_option("--trace", solve_trace, "Write a run trace JSON");
  solve->add_option("--out", solve_out)->required();
  bool solve_product = false;
  solve->add_flag("--product", solve_product,
                  "Write the zero-sum averaged product policy instead of the mixture");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Exact robust gap evaluation");
  std::string eval_game, eval_policy, eval_out;
  bool eval_ne = false;
  evaluate->add_option("--game", eval_game)->required();
  evaluate->add_option("--policy", eval_policy)->required();
  evaluate->add_flag("--ne", eval_ne, "Also report the NE gap (product policies)");
  evaluate->add_option("--out", eval_out)->required();

  // hard-instance
  auto* hard = app.add_subcommand("hard-instance",
                                  "Emit a lower-bound hard RMDP instance");
  int hard_h = 8;
  double hard_r = 0.0, hard_eps = 0.5, hard_c = 0.75, hard_c1 = 1.0;
  std::string hard_theta_bits, hard_out;
  std::uint64_t hard_theta_seed = 0;
  bool hard_random_theta = false, hard_print_closed = false;
  hard->add_option("--horizon", hard_h)->required();
  hard->add_option("--uncertainty", hard_r)->required();
  hard->add_option("--epsilon", hard_eps)->required();
  hard->add_option("--c", hard_c);
  hard->add_option("--c1", hard_c1);
  hard->add_option("--theta", hard_theta_bits, "Explicit theta bits, e.g. 0101");
  hard->add_option("--random-theta", hard_theta_seed,
                   "Draw theta uniformly from this seed")
      ->expected(1)
      ->each([&](const std::string&) { hard_random_theta = true; });
  hard->add_option("--out", hard_out);
  hard->add_flag("--closed-form", hard_print_closed,
                 "Print the optimal value table as CSV");

  // closed-form
  auto* closed = app.add_subcommand("closed-form",
                                    "Print the hard-instance V* table as CSV");
  int cf_h = 8;
  double cf_r = 0.0, cf_eps = 0.5, cf_c = 0.75, cf_c1 = 1.0;
  closed->add_option("--horizon", cf_h)->required();
  closed->add_option("--uncertainty", cf_r)->required();
  closed->add_option("--epsilon", cf_eps)->required();
  closed->add_option("--c", cf_c);
  closed->add_option("--c1", cf_c1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a (K, R, seed) grid");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const rmg::RobustMarkovGame game = rmg::generate_random_game(gen_spec);
      rmg::write_file(gen_out, rmg::game_to_json(game));
      std::cout << "wrote " << gen_out << "\n";
    } else if (solve->parsed()) {
      const rmg::RobustMarkovGame game =
          rmg::game_from_json(rmg::read_file(solve_game));
      algo.record_trace = !solve_trace.empty();
      const rmg::RunOutput output = rmg::run_robust_qftrl(game, algo);
      if (solve_product) {
        if (!output.zero_sum_products) {
          throw rmg::ValidationError(
              "--product requires a two-player zero-sum game (r1 + r2 = 1)");
        }
        rmg::write_file(solve_out, rmg::policy_to_json(*output.zero_sum_products));
      } else {
        rmg::write_file(solve_out, rmg::policy_to_json(output.mixture));
      }
      if (!solve_trace.empty()) {
        rmg::write_file(solve_trace, rmg::trace_to_json(game, output));
      }
      std::cout << "samples used: " << output.sample_count << "\n";
      if (output.checks.range_bound_warnings > 0) {
        std::cerr << "warning: value range bound exceeded "
                  << output.checks.range_bound_warnings
                  << " times (expected outside the theorem sample regime)\n";
      }
      if (output.checks.invariant_violations > 0) {
        throw rmg::ValidationError("runtime invariant violations detected");
      }
    } else if (evaluate->parsed()) {
      const rmg::RobustMarkovGame game =
          rmg::game_from_json(rmg::read_file(eval_game));
      const std::string policy_text = rmg::read_file(eval_policy);
      rmg::GapReport cce;
      std::optional<rmg::GapReport> ne;
      if (rmg::json_is_product_policy(policy_text)) {
        const rmg::ProductMarkovPolicy policy = rmg::product_from_json(policy_text);
        cce = rmg::cce_gap(game, rmg::as_mixture(policy));
        if (eval_ne) ne = rmg::ne_gap(game, policy);
      } else {
        const rmg::MixturePolicy policy = rmg::mixture_from_json(policy_text);
        cce = rmg::cce_gap(game, policy);
        if (eval_ne) {
          throw rmg::ValidationError("--ne requires a product policy file");
        }
      }
      rmg::write_file(eval_out, rmg::report_to_json(cce, ne ? &*ne : nullptr));
      std::cout << "cce_gap: " << rmg::format_double(cce.max_gap) << "\n";
      if (ne) std::cout << "ne_gap: " << rmg::format_double(ne->max_gap) << "\n";
    } else if (hard->parsed()) {
      const rmg::HardInstanceParams params =
          rmg::HardInstanceParams::make(hard_h, hard_r, hard_eps, hard_c, hard_c1);
      std::vector<int> theta;
      if (!hard_theta_bits.empty()) {
        theta = parse_theta(hard_theta_bits);
      } else if (hard_random_theta) {
        theta = random_theta(hard_h, hard_theta_seed);
      } else {
        theta.assign(hard_h, 0);
      }
      if (hard_print_closed) std::cout << closed_form_csv(params);
      if (!hard_out.empty()) {
        const rmg::RobustMarkovGame game = rmg::hard_rmdp(params, theta);
        rmg::write_file(hard_out, rmg::game_to_json(game));
        std::cout << "wrote " << hard_out << " (p=" << rmg::format_double(params.p)
                  << " q=" << rmg::format_double(params.q) << ")\n";
      }
    } else if (closed->parsed()) {
      const rmg::HardInstanceParams params =
          rmg::HardInstanceParams::make(cf_h, cf_r, cf_eps, cf_c, cf_c1);
      std::cout << closed_form_csv(params);
    } else if (sweep->parsed()) {
      const rmg::ExperimentConfig config = rmg::experiment_config_from_json(
          rmg::read_file(sweep_config), env_or("RMG_C_ALPHA", 24.0),
          env_or("RMG_C_B", 0.5), env_or("RMG_DELTA", 0.01));
      const std::vector<rmg::SweepRow> rows = rmg::run_sweep(config);
      const std::string csv = rmg::sweep_rows_to_csv(rows);
      if (!config.output_path.empty()) {
        rmg::write_file(config.output_path, csv);
        std::cout << "wrote " << config.output_path << "\n";
      } else {
        std::cout << csv;
      }
      for (const auto& row : rows) {
        if (!row.error.empty()) {
          std::cerr << "cell K=" << row.rounds << " R=" << row.uncertainty_level
                    << " seed=" << row.seed << " failed: " << row.error << "\n";
          return 2;
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
