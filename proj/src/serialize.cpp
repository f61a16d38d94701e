#include "rmg/serialize.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rmg {

namespace {

using nlohmann::json;

json kernel_to_json(const RobustMarkovGame& game) {
  const std::int64_t joint = game.num_joint_actions();
  json hs = json::array();
  for (int h = 0; h < game.horizon; ++h) {
    json ss = json::array();
    for (int s = 0; s < game.num_states; ++s) {
      json js = json::array();
      for (std::int64_t j = 0; j < joint; ++j) {
        const auto row = game.kernel_row(h, s, j);
        js.push_back(std::vector<double>(row.begin(), row.end()));
      }
      ss.push_back(std::move(js));
    }
    hs.push_back(std::move(ss));
  }
  return hs;
}

json rewards_to_json(const RobustMarkovGame& game) {
  const std::int64_t joint = game.num_joint_actions();
  json is = json::array();
  for (int i = 0; i < game.num_agents; ++i) {
    json hs = json::array();
    for (int h = 0; h < game.horizon; ++h) {
      json ss = json::array();
      for (int s = 0; s < game.num_states; ++s) {
        json js = json::array();
        for (std::int64_t j = 0; j < joint; ++j) {
          js.push_back(game.reward(i, h, s, j));
        }
        ss.push_back(std::move(js));
      }
      hs.push_back(std::move(ss));
    }
    is.push_back(std::move(hs));
  }
  return is;
}

json table_to_json(const std::vector<std::vector<double>>& table) {
  json out = json::array();
  for (const auto& row : table) out.push_back(row);
  return out;
}

std::vector<std::vector<double>> table_from_json(const json& j) {
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(row.get<std::vector<double>>());
  return out;
}

}  // namespace

std::string game_to_json(const RobustMarkovGame& game) {
  json doc;
  doc["num_agents"] = game.num_agents;
  doc["num_states"] = game.num_states;
  doc["action_counts"] = game.action_counts;
  doc["horizon"] = game.horizon;
  doc["uncertainty_level"] = game.uncertainty_level;
  doc["kernel"] = kernel_to_json(game);
  doc["rewards"] = rewards_to_json(game);
  return doc.dump(2) + "\n";
}

RobustMarkovGame game_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid game JSON: ") + e.what());
  }
  RobustMarkovGame game;
  game.num_agents = doc.at("num_agents").get<int>();
  game.num_states = doc.at("num_states").get<int>();
  game.action_counts = doc.at("action_counts").get<std::vector<int>>();
  game.horizon = doc.at("horizon").get<int>();
  game.uncertainty_level = doc.at("uncertainty_level").get<double>();
  game.indexer = JointActionIndexer(game.action_counts);

  const std::int64_t joint = game.indexer.num_joint();
  game.kernel.reserve(static_cast<std::size_t>(game.horizon) * game.num_states *
                      joint * game.num_states);
  for (const auto& hs : doc.at("kernel")) {
    for (const auto& ss : hs) {
      for (const auto& js : ss) {
        for (const auto& x : js) game.kernel.push_back(x.get<double>());
      }
    }
  }
  game.rewards.reserve(static_cast<std::size_t>(game.num_agents) * game.horizon *
                       game.num_states * joint);
  for (const auto& is : doc.at("rewards")) {
    for (const auto& hs : is) {
      for (const auto& ss : hs) {
        for (const auto& x : ss) game.rewards.push_back(x.get<double>());
      }
    }
  }
  validate(game);
  return game;
}

std::string policy_to_json(const MixturePolicy& policy) {
  json doc;
  doc["type"] = "mixture";
  json steps = json::array();
  for (const auto& step : policy.steps) {
    json step_doc;
    step_doc["weights"] = step.weights;
    json comps = json::array();
    for (const auto& comp : step.components) {
      json agents = json::array();
      for (const auto& table : comp.dist) agents.push_back(table_to_json(table));
      comps.push_back(std::move(agents));
    }
    step_doc["components"] = std::move(comps);
    steps.push_back(std::move(step_doc));
  }
  doc["steps"] = std::move(steps);
  return doc.dump(2) + "\n";
}

std::string policy_to_json(const ProductMarkovPolicy& policy) {
  json doc;
  doc["type"] = "product";
  json agents = json::array();
  for (const auto& agent_tables : policy.tables) {
    json steps = json::array();
    for (const auto& table : agent_tables) steps.push_back(table_to_json(table));
    agents.push_back(std::move(steps));
  }
  doc["agents"] = std::move(agents);
  return doc.dump(2) + "\n";
}

bool json_is_product_policy(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid policy JSON: ") + e.what());
  }
  return doc.value("type", "") == "product";
}

MixturePolicy mixture_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid policy JSON: ") + e.what());
  }
  if (doc.value("type", "") != "mixture") {
    throw ValidationError("policy JSON is not a mixture policy");
  }
  MixturePolicy policy;
  for (const auto& step_doc : doc.at("steps")) {
    MixturePolicy::Step step;
    step.weights = step_doc.at("weights").get<std::vector<double>>();
    for (const auto& comp_doc : step_doc.at("components")) {
      StageProduct comp;
      for (const auto& table : comp_doc) comp.dist.push_back(table_from_json(table));
      step.components.push_back(std::move(comp));
    }
    policy.steps.push_back(std::move(step));
  }
  validate(policy);
  return policy;
}

ProductMarkovPolicy product_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid policy JSON: ") + e.what());
  }
  if (doc.value("type", "") != "product") {
    throw ValidationError("policy JSON is not a product policy");
  }
  ProductMarkovPolicy policy;
  for (const auto& agent_doc : doc.at("agents")) {
    std::vector<std::vector<std::vector<double>>> steps;
    for (const auto& table : agent_doc) steps.push_back(table_from_json(table));
    policy.tables.push_back(std::move(steps));
  }
  validate(policy);
  return policy;
}

std::string report_to_json(const GapReport& cce, const GapReport* ne) {
  json doc;
  auto fill = [](const GapReport& report) {
    json out;
    out["gaps"] = report.gaps;
    out["per_agent_max"] = report.per_agent_max;
    out["max_gap"] = report.max_gap;
    out["policy_values"] = report.policy_values.values;
    json stars = json::array();
    for (const auto& br : report.best_responses) stars.push_back(br.v_star);
    out["best_response_values"] = std::move(stars);
    return out;
  };
  doc["cce"] = fill(cce);
  doc["cce_gap"] = cce.max_gap;
  if (ne != nullptr) {
    doc["ne"] = fill(*ne);
    doc["ne_gap"] = ne->max_gap;
  }
  return doc.dump(2) + "\n";
}

std::string trace_to_json(const RobustMarkovGame& game, const RunOutput& output) {
  json doc;
  doc["sample_count"] = output.sample_count;
  doc["invariant_violations"] = output.checks.invariant_violations;
  doc["range_bound_warnings"] = output.checks.range_bound_warnings;
  doc["values"] = output.values.values;
  doc["q_tables"] = output.q_tables.values;
  if (output.trace) {
    doc["beta"] = output.trace->beta;
    doc["weighted_mean"] = output.trace->weighted_mean;
    doc["full_trace_retained"] = output.trace->full;
  }
  doc["num_agents"] = game.num_agents;
  doc["horizon"] = game.horizon;
  return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
}

}  // namespace rmg
