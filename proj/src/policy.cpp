#include "rmg/policy.hpp"

#include <cmath>
#include <string>

namespace rmg {

namespace {

constexpr double kRowTol = 1e-12;

void check_row(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double x : row) {
    if (x < 0.0 || !std::isfinite(x)) {
      throw ValidationError(what + ": negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kRowTol) {
    throw ValidationError(what + ": row sum " + std::to_string(sum) + " != 1");
  }
}

}  // namespace

void validate(const MixturePolicy& policy) {
  for (std::size_t h = 0; h < policy.steps.size(); ++h) {
    const auto& step = policy.steps[h];
    if (step.weights.size() != step.components.size()) {
      throw ValidationError("mixture step " + std::to_string(h) +
                            ": weights/components size mismatch");
    }
    check_row(step.weights, "mixture weights at step " + std::to_string(h));
    for (const auto& comp : step.components) {
      for (const auto& agent_table : comp.dist) {
        for (const auto& row : agent_table) {
          check_row(row, "mixture component row at step " + std::to_string(h));
        }
      }
    }
  }
}

void validate(const ProductMarkovPolicy& policy) {
  for (const auto& agent_table : policy.tables) {
    for (const auto& step_table : agent_table) {
      for (const auto& row : step_table) {
        check_row(row, "product policy row");
      }
    }
  }
}

std::vector<double> joint_action_distribution(const MixturePolicy& policy,
                                              const JointActionIndexer& indexer,
                                              int h, int s) {
  const auto& step = policy.steps[h];
  const std::int64_t joint = indexer.num_joint();
  const int m = indexer.num_agents();
  std::vector<double> out(joint, 0.0);
  std::vector<int> actions(m);
  for (std::size_t k = 0; k < step.components.size(); ++k) {
    const double w = step.weights[k];
    const auto& comp = step.components[k];
    for (std::int64_t j = 0; j < joint; ++j) {
      indexer.decode(j, actions);
      double prob = w;
      for (int i = 0; i < m; ++i) prob *= comp.dist[i][s][actions[i]];
      out[j] += prob;
    }
  }
  return out;
}

std::vector<double> marginal_excluding(const MixturePolicy& policy,
                                       const JointActionIndexer& indexer, int h,
                                       int s, int agent) {
  const auto& step = policy.steps[h];
  const int m = indexer.num_agents();
  const std::int64_t sub_count = indexer.num_excluding(agent);
  std::vector<double> out(sub_count, 0.0);
  for (std::size_t k = 0; k < step.components.size(); ++k) {
    const double w = step.weights[k];
    const auto& comp = step.components[k];
    for (std::int64_t sub = 0; sub < sub_count; ++sub) {
      double prob = w;
      std::int64_t rest = sub;
      for (int i = m - 1; i >= 0; --i) {
        if (i == agent) continue;
        const int a = static_cast<int>(rest % indexer.count(i));
        rest /= indexer.count(i);
        prob *= comp.dist[i][s][a];
      }
      out[sub] += prob;
    }
  }
  return out;
}

std::vector<std::vector<double>> average_agent_policy(
    const std::vector<std::vector<std::vector<double>>>& components,
    std::span<const double> weights) {
  const std::size_t num_states = components.front().size();
  const std::size_t num_actions = components.front().front().size();
  std::vector<std::vector<double>> out(num_states,
                                       std::vector<double>(num_actions, 0.0));
  for (std::size_t k = 0; k < components.size(); ++k) {
    for (std::size_t s = 0; s < num_states; ++s) {
      for (std::size_t a = 0; a < num_actions; ++a) {
        out[s][a] += weights[k] * components[k][s][a];
      }
    }
  }
  return out;
}

MixturePolicy as_mixture(const ProductMarkovPolicy& policy) {
  MixturePolicy mix;
  const int H = policy.horizon();
  const int m = policy.num_agents();
  mix.steps.resize(H);
  for (int h = 0; h < H; ++h) {
    StageProduct comp;
    comp.dist.resize(m);
    for (int i = 0; i < m; ++i) comp.dist[i] = policy.tables[i][h];
    mix.steps[h].weights = {1.0};
    mix.steps[h].components = {std::move(comp)};
  }
  return mix;
}

ProductMarkovPolicy average_to_product(const MixturePolicy& policy) {
  ProductMarkovPolicy out;
  const int H = policy.horizon();
  if (H == 0) return out;
  const int m = policy.steps[0].components.front().num_agents();
  out.tables.resize(m);
  for (int i = 0; i < m; ++i) {
    out.tables[i].resize(H);
    for (int h = 0; h < H; ++h) {
      const auto& step = policy.steps[h];
      std::vector<std::vector<std::vector<double>>> rows;
      rows.reserve(step.components.size());
      for (const auto& comp : step.components) rows.push_back(comp.dist[i]);
      out.tables[i][h] = average_agent_policy(rows, step.weights);
    }
  }
  return out;
}

}  // namespace rmg
