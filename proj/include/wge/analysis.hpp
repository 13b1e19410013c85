#pragma once

#include "wge/consensus.hpp"

namespace wge {

struct RewardConfig {
  double gamma = 0.9;
  double tolerance = 1e-9;
  int max_iterations = 10000;
};

struct ClassifierConfig {
  double w_high = 0.05;    // "occurs often"
  double w_low = 0.02;     // "rare"
  double s_fail = 0.2;     // "almost always fails"
  double s_success = 0.9;  // "consistently successful"

  void validate() const;  // throws BAD_CONFIG
};

// V(v) = base(v) + gamma * sum_{e=(v,u)} count(e)/out_count(v) * V(u), with
// base(v) = (end_success - end_fail) / visit_count. Acyclic graphs are
// solved in reverse topological order; cyclic ones by fixed-point iteration
// (gamma < 1 makes the update a contraction).
// Returns values indexed by NodeId and stores them on g.nodes[i].value.
// Throws NO_CONVERGENCE if max_iterations is exhausted.
std::vector<double> propagate_rewards(ConsensusGraph& g,
                                      const RewardConfig& cfg = {});

// Trap:       w >= w_high and s <= s_fail
// Critical:   w <= w_low  and s >= s_success
// Bottleneck: w >= w_high and s_fail < s < s_success
// Normal:     everything else
EdgeClass classify_edge(double w, double s, const ClassifierConfig& cfg);
void classify_edges(ConsensusGraph& g, const ClassifierConfig& cfg = {});

// importance(v) = mean of available in/out edge success-ratio means,
// times visit_count(v) / total visits.
std::vector<double> node_importance(ConsensusGraph& g);

}  // namespace wge
