#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wge/dataset.hpp"

namespace wge {

using NodeId = int;

enum class EdgeClass { Trap, Critical, Bottleneck, Normal };

std::string edge_class_name(EdgeClass c);
std::optional<EdgeClass> edge_class_from_name(std::string_view name);

struct MemberRef {
  int trajectory;  // index into the graph's canonical trajectory order
  int step;
};

struct Node {
  NodeId id = 0;
  CanonicalAction representative;
  std::string key;  // canonical_string of the representative
  std::vector<MemberRef> members;
  long visit_count = 0;
  long success_visit_count = 0;
  long end_success_count = 0;
  long end_fail_count = 0;
  std::map<int, long> step_histogram;
  double value = 0.0;       // V(v), filled by analysis
  double importance = 0.0;  // filled by analysis
};

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  long count = 0;
  long success_count = 0;
  long fail_count = 0;
  double success_ratio = 0.0;  // s(e)
  double weight = 0.0;         // w(e)
  std::optional<EdgeClass> cls;
};

struct ConsensusGraph {
  std::string task_id;
  std::vector<Node> nodes;  // index == NodeId
  std::map<std::pair<NodeId, NodeId>, Edge> edges;
  // assignment pi, per trajectory in canonical (agent_id, run_index) order
  std::vector<std::vector<NodeId>> assignment;
  std::vector<std::string> trajectory_keys;  // "agent#run"
  std::vector<Outcome> trajectory_outcomes;
  int trajectory_count = 0;
};

// Deterministic union-find with union by canonical representative: the
// class representative is always the instance whose canonical string is
// lexicographically least (ties by lowest instance index).
class UnionFind {
 public:
  explicit UnionFind(int n);
  int find(int x);
  // keeps the representative chosen by better(a_root, b_root)
  void unite(int a, int b,
             const std::vector<std::pair<std::string, int>>& rank_key);
  std::vector<std::vector<int>> classes();

 private:
  std::vector<int> parent_;
};

// Builds the per-task graph: step-based then cross-step similarity merging
// at threshold theta, then edge accumulation and outcome-conditioned stats.
// All trajectories must share one task_id and be judged. The result is
// independent of the input ordering.
ConsensusGraph build_consensus(const std::vector<const Trajectory*>& trajs,
                               double theta);

// The two merge passes, exposed for tests. Instances are identified by
// index into `keys` (one canonical string per action instance);
// `steps[i]` is instance i's step index.
void step_merge(const std::vector<std::u32string>& codepoints,
                const std::vector<int>& steps, double theta, UnionFind& uf,
                const std::vector<std::pair<std::string, int>>& rank_key);
void cross_step_merge(const std::vector<std::u32string>& codepoints,
                      double theta, UnionFind& uf,
                      const std::vector<std::pair<std::string, int>>& rank_key);

nlohmann::ordered_json export_graph_json(const ConsensusGraph& g);
ConsensusGraph import_graph_json(const nlohmann::ordered_json& j);
std::string export_dot(const ConsensusGraph& g);

}  // namespace wge
