#pragma once

#include <vector>

#include "rmg/game.hpp"

namespace rmg {

// One round's product policy at a fixed step: per-agent row-stochastic
// tables dist[i][s][a_i].
struct StageProduct {
  std::vector<std::vector<std::vector<double>>> dist;

  int num_agents() const { return static_cast<int>(dist.size()); }
};

// The algorithm's correlated output: per step h a convex mixture of product
// policies, pi_h(a|s) = sum_k w_k prod_i d^k_i(a_i|s).
struct MixturePolicy {
  struct Step {
    std::vector<double> weights;
    std::vector<StageProduct> components;
  };
  std::vector<Step> steps;  // size H

  int horizon() const { return static_cast<int>(steps.size()); }
};

// Independent per-agent Markov policy: tables[i][h] is S x A_i.
struct ProductMarkovPolicy {
  std::vector<std::vector<std::vector<std::vector<double>>>> tables;

  int num_agents() const { return static_cast<int>(tables.size()); }
  int horizon() const { return tables.empty() ? 0 : static_cast<int>(tables[0].size()); }
};

// Checks mixture weights and component rows; throws ValidationError.
void validate(const MixturePolicy& policy);
void validate(const ProductMarkovPolicy& policy);

// sum_k w_k prod_i d^k_i(a_i|s) over the flat joint-action index.
std::vector<double> joint_action_distribution(const MixturePolicy& policy,
                                              const JointActionIndexer& indexer,
                                              int h, int s);

// Distribution over the other agents' joint sub-actions,
// sum_k w_k prod_{j != i} d^k_j(a_j|s). Stays correlated across the others:
// it is a mixture of products, which is exactly the CCE deviation marginal.
std::vector<double> marginal_excluding(const MixturePolicy& policy,
                                       const JointActionIndexer& indexer, int h,
                                       int s, int agent);

// Convex combination of per-agent stage rows; used for the zero-sum averaged
// output and for collapsing single-agent mixtures.
std::vector<std::vector<double>> average_agent_policy(
    const std::vector<std::vector<std::vector<double>>>& components,
    std::span<const double> weights);

// Wraps a product policy as a single-component mixture (weight 1), so both
// policy kinds share the exact-evaluation path.
MixturePolicy as_mixture(const ProductMarkovPolicy& policy);

// Averages each agent's mixture components into an independent policy;
// exact for m = 1, and the Corollary-1 output shape for m = 2.
ProductMarkovPolicy average_to_product(const MixturePolicy& policy);

}  // namespace rmg
