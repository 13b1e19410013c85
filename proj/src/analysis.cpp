#include "wge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "wge/error.hpp"

namespace wge {

void ClassifierConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(w_high) || !unit(w_low) || !unit(s_fail) || !unit(s_success))
    throw Error("BAD_CONFIG", "classifier thresholds must lie in [0,1]");
  if (w_low > w_high) throw Error("BAD_CONFIG", "w_low must be <= w_high");
  if (s_fail >= s_success) throw Error("BAD_CONFIG", "s_fail must be < s_success");
}

namespace {

struct Successor {
  NodeId to;
  double probability;
};

}  // namespace

std::vector<double> propagate_rewards(ConsensusGraph& g, const RewardConfig& cfg) {
  const size_t n = g.nodes.size();
  std::vector<double> base(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const Node& node = g.nodes[i];
    if (node.visit_count > 0)
      base[i] = static_cast<double>(node.end_success_count - node.end_fail_count) /
                static_cast<double>(node.visit_count);
  }

  std::vector<std::vector<Successor>> succ(n);
  std::vector<long> out_count(n, 0);
  for (const auto& [key, e] : g.edges) out_count[e.from] += e.count;
  for (const auto& [key, e] : g.edges)
    succ[e.from].push_back({e.to, static_cast<double>(e.count) / out_count[e.from]});

  // Kahn's algorithm to find a reverse-topological evaluation order
  std::vector<int> out_degree(n, 0);
  std::vector<std::vector<NodeId>> preds(n);
  for (const auto& [key, e] : g.edges) {
    out_degree[e.from] += 1;
    preds[e.to].push_back(e.from);
  }
  std::deque<NodeId> ready;
  for (size_t i = 0; i < n; ++i)
    if (out_degree[i] == 0) ready.push_back(static_cast<NodeId>(i));
  std::vector<NodeId> order;
  std::vector<int> remaining = out_degree;
  while (!ready.empty()) {
    NodeId v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (NodeId p : preds[v])
      if (--remaining[p] == 0) ready.push_back(p);
  }

  std::vector<double> value(n, 0.0);
  if (order.size() == n) {
    // acyclic: single sweep, successors already final
    for (NodeId v : order) {
      double acc = base[v];
      for (const auto& s : succ[v]) acc += cfg.gamma * s.probability * value[s.to];
      value[v] = acc;
    }
  } else {
    bool converged = false;
    for (int iter = 0; iter < cfg.max_iterations && !converged; ++iter) {
      double max_delta = 0.0;
      for (size_t v = 0; v < n; ++v) {
        double acc = base[v];
        for (const auto& s : succ[v]) acc += cfg.gamma * s.probability * value[s.to];
        max_delta = std::max(max_delta, std::fabs(acc - value[v]));
        value[v] = acc;
      }
      converged = max_delta < cfg.tolerance;
    }
    if (!converged)
      throw Error("NO_CONVERGENCE", "reward propagation did not converge in " +
                                        std::to_string(cfg.max_iterations) +
                                        " iterations");
  }

  for (size_t i = 0; i < n; ++i) g.nodes[i].value = value[i];
  return value;
}

EdgeClass classify_edge(double w, double s, const ClassifierConfig& cfg) {
  if (w >= cfg.w_high && s <= cfg.s_fail) return EdgeClass::Trap;
  if (w <= cfg.w_low && s >= cfg.s_success) return EdgeClass::Critical;
  if (w >= cfg.w_high && s > cfg.s_fail && s < cfg.s_success)
    return EdgeClass::Bottleneck;
  return EdgeClass::Normal;
}

void classify_edges(ConsensusGraph& g, const ClassifierConfig& cfg) {
  cfg.validate();
  for (auto& [key, e] : g.edges)
    e.cls = classify_edge(e.weight, e.success_ratio, cfg);
}

std::vector<double> node_importance(ConsensusGraph& g) {
  const size_t n = g.nodes.size();
  std::vector<double> in_sum(n, 0.0), out_sum(n, 0.0);
  std::vector<long> in_cnt(n, 0), out_cnt(n, 0);
  for (const auto& [key, e] : g.edges) {
    out_sum[e.from] += e.success_ratio;
    out_cnt[e.from] += 1;
    in_sum[e.to] += e.success_ratio;
    in_cnt[e.to] += 1;
  }
  long total_visits = 0;
  for (const auto& node : g.nodes) total_visits += node.visit_count;

  std::vector<double> importance(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    if (in_cnt[i] > 0 && out_cnt[i] > 0)
      mean = (in_sum[i] / in_cnt[i] + out_sum[i] / out_cnt[i]) / 2.0;
    else if (in_cnt[i] > 0)
      mean = in_sum[i] / in_cnt[i];
    else if (out_cnt[i] > 0)
      mean = out_sum[i] / out_cnt[i];
    double frequency =
        total_visits > 0
            ? static_cast<double>(g.nodes[i].visit_count) / total_visits
            : 0.0;
    importance[i] = mean * frequency;
    g.nodes[i].importance = importance[i];
  }
  return importance;
}

}  // namespace wge
