#include "wge/consensus.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "wge/editdist.hpp"
#include "wge/error.hpp"

namespace wge {

using nlohmann::ordered_json;

std::string edge_class_name(EdgeClass c) {
  switch (c) {
    case EdgeClass::Trap: return "trap";
    case EdgeClass::Critical: return "critical";
    case EdgeClass::Bottleneck: return "bottleneck";
    default: return "normal";
  }
}

std::optional<EdgeClass> edge_class_from_name(std::string_view name) {
  if (name == "trap") return EdgeClass::Trap;
  if (name == "critical") return EdgeClass::Critical;
  if (name == "bottleneck") return EdgeClass::Bottleneck;
  if (name == "normal") return EdgeClass::Normal;
  return std::nullopt;
}

UnionFind::UnionFind(int n) : parent_(n) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int UnionFind::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void UnionFind::unite(int a, int b,
                      const std::vector<std::pair<std::string, int>>& rank_key) {
  int ra = find(a), rb = find(b);
  if (ra == rb) return;
  if (rank_key[rb] < rank_key[ra]) std::swap(ra, rb);
  parent_[rb] = ra;
}

std::vector<std::vector<int>> UnionFind::classes() {
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(parent_.size()); ++i)
    groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

namespace {

// Unions every pair of instances in `indices` whose similarity >= theta.
// Instances with identical strings are united up front so the pairwise
// kernel only ever sees distinct strings.
void merge_scope(const std::vector<int>& indices,
                 const std::vector<std::u32string>& codepoints, double theta,
                 UnionFind& uf,
                 const std::vector<std::pair<std::string, int>>& rank_key) {
  std::map<std::u32string, std::vector<int>> by_string;
  for (int idx : indices) by_string[codepoints[idx]].push_back(idx);

  std::vector<const std::u32string*> uniq;
  std::vector<int> anchor;  // one instance per distinct string
  for (auto& [str, members] : by_string) {
    for (size_t i = 1; i < members.size(); ++i)
      uf.unite(members[0], members[i], rank_key);
    uniq.push_back(&str);
    anchor.push_back(members[0]);
  }

  if (uniq.size() < 2) return;
  std::vector<uint32_t> dist(uniq.size());
  std::vector<std::u32string> targets;
  for (size_t i = 0; i + 1 < uniq.size(); ++i) {
    targets.assign(uniq.size() - i - 1, std::u32string());
    for (size_t j = i + 1; j < uniq.size(); ++j) targets[j - i - 1] = *uniq[j];
    std::span<uint32_t> out(dist.data(), targets.size());
    editdist::levenshtein_batch(*uniq[i], targets, out);
    for (size_t j = i + 1; j < uniq.size(); ++j) {
      size_t longest = std::max(uniq[i]->size(), uniq[j]->size());
      double sim = 1.0 - static_cast<double>(out[j - i - 1]) /
                             static_cast<double>(longest);
      if (sim >= theta) uf.unite(anchor[i], anchor[j], rank_key);
    }
  }
}

}  // namespace

void step_merge(const std::vector<std::u32string>& codepoints,
                const std::vector<int>& steps, double theta, UnionFind& uf,
                const std::vector<std::pair<std::string, int>>& rank_key) {
  std::map<int, std::vector<int>> buckets;
  for (size_t i = 0; i < codepoints.size(); ++i)
    buckets[steps[i]].push_back(static_cast<int>(i));
  for (auto& [step, indices] : buckets)
    merge_scope(indices, codepoints, theta, uf, rank_key);
}

void cross_step_merge(const std::vector<std::u32string>& codepoints,
                      double theta, UnionFind& uf,
                      const std::vector<std::pair<std::string, int>>& rank_key) {
  std::vector<int> all(codepoints.size());
  std::iota(all.begin(), all.end(), 0);
  merge_scope(all, codepoints, theta, uf, rank_key);
}

ConsensusGraph build_consensus(const std::vector<const Trajectory*>& trajs,
                               double theta) {
  ConsensusGraph g;
  if (trajs.empty()) return g;

  g.task_id = trajs[0]->task_id;
  for (const Trajectory* t : trajs) {
    if (t->task_id != g.task_id)
      throw Error("MIXED_TASKS", "trajectories span multiple task_ids: " +
                                     g.task_id + " vs " + t->task_id);
    if (t->outcome == Outcome::Unjudged)
      throw Error("UNJUDGED", "trajectory " + t->key() + " is unjudged");
  }

  // canonical trajectory order, independent of caller ordering
  std::vector<const Trajectory*> ordered = trajs;
  std::sort(ordered.begin(), ordered.end(),
            [](const Trajectory* a, const Trajectory* b) {
              return std::tie(a->agent_id, a->run_index) <
                     std::tie(b->agent_id, b->run_index);
            });

  g.trajectory_count = static_cast<int>(ordered.size());
  for (const Trajectory* t : ordered) {
    g.trajectory_keys.push_back(t->agent_id + "#" + std::to_string(t->run_index));
    g.trajectory_outcomes.push_back(t->outcome);
  }

  // flatten action instances
  std::vector<std::string> keys;
  std::vector<std::u32string> codepoints;
  std::vector<int> steps;
  std::vector<MemberRef> refs;
  for (size_t ti = 0; ti < ordered.size(); ++ti) {
    const auto& actions = ordered[ti]->actions;
    for (size_t si = 0; si < actions.size(); ++si) {
      keys.push_back(canonical_string(actions[si]));
      codepoints.push_back(to_codepoints(keys.back()));
      steps.push_back(static_cast<int>(si));
      refs.push_back({static_cast<int>(ti), static_cast<int>(si)});
    }
  }

  std::vector<std::pair<std::string, int>> rank_key(keys.size());
  for (size_t i = 0; i < keys.size(); ++i) rank_key[i] = {keys[i], static_cast<int>(i)};

  UnionFind uf(static_cast<int>(keys.size()));
  step_merge(codepoints, steps, theta, uf, rank_key);
  cross_step_merge(codepoints, theta, uf, rank_key);

  // classes -> nodes, ids sorted by representative string
  auto classes = uf.classes();
  std::sort(classes.begin(), classes.end(),
            [&](const std::vector<int>& a, const std::vector<int>& b) {
              return rank_key[uf.find(a[0])].first < rank_key[uf.find(b[0])].first;
            });

  std::vector<NodeId> instance_node(keys.size());
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    Node node;
    node.id = static_cast<NodeId>(ci);
    int rep = uf.find(classes[ci][0]);
    node.key = keys[rep];
    node.representative = ordered[refs[rep].trajectory]->actions[refs[rep].step];
    for (int inst : classes[ci]) {
      node.members.push_back(refs[inst]);
      instance_node[inst] = node.id;
    }
    std::sort(node.members.begin(), node.members.end(),
              [](const MemberRef& a, const MemberRef& b) {
                return std::tie(a.trajectory, a.step) < std::tie(b.trajectory, b.step);
              });
    g.nodes.push_back(std::move(node));
  }

  // assignment pi and per-node visit statistics
  g.assignment.resize(ordered.size());
  size_t inst = 0;
  for (size_t ti = 0; ti < ordered.size(); ++ti) {
    bool success = ordered[ti]->outcome == Outcome::Success;
    const size_t len = ordered[ti]->actions.size();
    for (size_t si = 0; si < len; ++si, ++inst) {
      NodeId id = instance_node[inst];
      g.assignment[ti].push_back(id);
      Node& node = g.nodes[id];
      node.visit_count += 1;
      if (success) node.success_visit_count += 1;
      node.step_histogram[static_cast<int>(si)] += 1;
      if (si + 1 == len) {
        if (success) node.end_success_count += 1;
        else node.end_fail_count += 1;
      }
    }
  }

  // edge accumulation over adjacent pairs
  for (size_t ti = 0; ti < ordered.size(); ++ti) {
    bool success = ordered[ti]->outcome == Outcome::Success;
    const auto& path = g.assignment[ti];
    for (size_t si = 0; si + 1 < path.size(); ++si) {
      auto key = std::make_pair(path[si], path[si + 1]);
      Edge& e = g.edges[key];
      e.from = path[si];
      e.to = path[si + 1];
      e.count += 1;
      if (success) e.success_count += 1;
      else e.fail_count += 1;
    }
  }

  long total = 0;
  for (const auto& [key, e] : g.edges) total += e.count;
  for (auto& [key, e] : g.edges) {
    e.success_ratio = static_cast<double>(e.success_count) / e.count;
    e.weight = static_cast<double>(e.count) / total;
  }
  return g;
}

ordered_json export_graph_json(const ConsensusGraph& g) {
  ordered_json j;
  j["task_id"] = g.task_id;
  j["trajectory_count"] = g.trajectory_count;
  ordered_json trajs = ordered_json::array();
  for (size_t i = 0; i < g.trajectory_keys.size(); ++i)
    trajs.push_back(ordered_json{{"key", g.trajectory_keys[i]},
                                 {"outcome", outcome_name(g.trajectory_outcomes[i])}});
  j["trajectories"] = std::move(trajs);

  ordered_json nodes = ordered_json::array();
  for (const auto& n : g.nodes) {
    ordered_json nj;
    nj["id"] = n.id;
    nj["action"] = n.key;
    nj["visits"] = n.visit_count;
    nj["success_visits"] = n.success_visit_count;
    nj["ends"] = ordered_json{{"success", n.end_success_count},
                              {"fail", n.end_fail_count}};
    ordered_json hist = ordered_json::object();
    for (const auto& [step, count] : n.step_histogram)
      hist[std::to_string(step)] = count;
    nj["histogram"] = std::move(hist);
    nj["value"] = n.value;
    nj["importance"] = n.importance;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);

  ordered_json edges = ordered_json::array();
  for (const auto& [key, e] : g.edges) {
    ordered_json ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["count"] = e.count;
    ej["success"] = e.success_count;
    ej["fail"] = e.fail_count;
    ej["s"] = e.success_ratio;
    ej["w"] = e.weight;
    ej["class"] = e.cls ? ordered_json(edge_class_name(*e.cls)) : ordered_json(nullptr);
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);

  ordered_json assignment = ordered_json::object();
  for (size_t i = 0; i < g.assignment.size(); ++i)
    assignment[g.trajectory_keys[i]] = g.assignment[i];
  j["assignment"] = std::move(assignment);
  return j;
}

ConsensusGraph import_graph_json(const ordered_json& j) {
  ConsensusGraph g;
  g.task_id = j.at("task_id").get<std::string>();
  g.trajectory_count = j.at("trajectory_count").get<int>();
  for (const auto& tj : j.at("trajectories")) {
    g.trajectory_keys.push_back(tj.at("key").get<std::string>());
    std::string o = tj.at("outcome").get<std::string>();
    g.trajectory_outcomes.push_back(o == "success" ? Outcome::Success
                                                   : Outcome::Failure);
  }
  for (const auto& nj : j.at("nodes")) {
    Node n;
    n.id = nj.at("id").get<NodeId>();
    n.key = nj.at("action").get<std::string>();
    n.representative = parse_action(n.key);
    n.visit_count = nj.at("visits").get<long>();
    n.success_visit_count = nj.at("success_visits").get<long>();
    n.end_success_count = nj.at("ends").at("success").get<long>();
    n.end_fail_count = nj.at("ends").at("fail").get<long>();
    for (const auto& [step, count] : nj.at("histogram").items())
      n.step_histogram[std::stoi(step)] = count.get<long>();
    n.value = nj.at("value").get<double>();
    n.importance = nj.at("importance").get<double>();
    g.nodes.push_back(std::move(n));
  }
  for (const auto& ej : j.at("edges")) {
    Edge e;
    e.from = ej.at("from").get<NodeId>();
    e.to = ej.at("to").get<NodeId>();
    e.count = ej.at("count").get<long>();
    e.success_count = ej.at("success").get<long>();
    e.fail_count = ej.at("fail").get<long>();
    e.success_ratio = ej.at("s").get<double>();
    e.weight = ej.at("w").get<double>();
    if (!ej.at("class").is_null())
      e.cls = edge_class_from_name(ej.at("class").get<std::string>());
    g.edges[{e.from, e.to}] = std::move(e);
  }
  if (j.contains("assignment")) {
    g.assignment.resize(g.trajectory_keys.size());
    for (size_t i = 0; i < g.trajectory_keys.size(); ++i) {
      const auto& aj = j.at("assignment").at(g.trajectory_keys[i]);
      g.assignment[i] = aj.get<std::vector<NodeId>>();
      for (size_t si = 0; si < g.assignment[i].size(); ++si)
        g.nodes[g.assignment[i][si]].members.push_back(
            {static_cast<int>(i), static_cast<int>(si)});
    }
  }
  return g;
}

std::string export_dot(const ConsensusGraph& g) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out;
  };
  auto color = [](const std::optional<EdgeClass>& cls) -> const char* {
    if (!cls) return "black";
    switch (*cls) {
      case EdgeClass::Trap: return "red";
      case EdgeClass::Critical: return "forestgreen";
      case EdgeClass::Bottleneck: return "orange";
      default: return "gray50";
    }
  };

  std::string out = "digraph \"" + escape(g.task_id) + "\" {\n";
  out += "  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& n : g.nodes) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%ld", n.visit_count);
    out += "  n" + std::to_string(n.id) + " [label=\"" + escape(n.key) +
           "\\nvisits=" + buf + "\"];\n";
  }
  for (const auto& [key, e] : g.edges) {
    char attrs[128];
    std::snprintf(attrs, sizeof(attrs),
                  " [color=%s, penwidth=%.3f, label=\"%ld (s=%.2f)\"]",
                  color(e.cls), 1.0 + 6.0 * e.weight, e.count, e.success_ratio);
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) +
           attrs + ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace wge
