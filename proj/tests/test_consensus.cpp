#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "wge/consensus.hpp"
#include "wge/error.hpp"
#include "wge/rng.hpp"
#include "wge/synth.hpp"

using namespace wge;

namespace {

Trajectory make_traj(const std::string& task, const std::string& agent, int run,
                     Outcome outcome, const std::vector<std::string>& calls) {
  Trajectory t;
  t.task_id = task;
  t.agent_id = agent;
  t.run_index = run;
  t.outcome = outcome;
  t.judge_confidence = 1.0;
  for (const auto& c : calls) t.actions.push_back(parse_action(c));
  return t;
}

std::vector<const Trajectory*> ptrs(const std::vector<Trajectory>& ts) {
  std::vector<const Trajectory*> out;
  for (const auto& t : ts) out.push_back(&t);
  return out;
}

// Brute-force oracle: transitive closure of the pairwise >= theta relation,
// where the step pass only relates instances at equal step indices and the
// cross pass relates everything.
std::vector<int> closure_classes(const std::vector<std::string>& keys,
                                 const std::vector<int>& steps, double theta) {
  size_t n = keys.size();
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      bool related = string_similarity(keys[i], keys[j]) >= theta;
      // both merge passes run, so the cross pass makes equal-step restriction moot
      (void)steps;
      rel[i][j] = related;
    }
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (rel[i][k] && rel[k][j]) rel[i][j] = true;
  std::vector<int> cls(n, -1);
  int next = 0;
  for (size_t i = 0; i < n; ++i) {
    if (cls[i] != -1) continue;
    cls[i] = next;
    for (size_t j = 0; j < n; ++j)
      if (rel[i][j]) cls[j] = next;
    ++next;
  }
  return cls;
}

}  // namespace

TEST_CASE("two-trajectory fixture: shared path, split outcome") {
  std::vector<Trajectory> ts = {
      make_traj("t", "a", 0, Outcome::Success,
                {"goto(url='https://x.example')", "click(text='Buy')"}),
      make_traj("t", "b", 0, Outcome::Failure,
                {"goto(url='https://x.example')", "click(text='Buy')"}),
  };
  ConsensusGraph g = build_consensus(ptrs(ts), 0.9);
  REQUIRE(g.nodes.size() == 2);
  REQUIRE(g.edges.size() == 1);
  const Edge& e = g.edges.begin()->second;
  CHECK(e.count == 2);
  CHECK(e.success_count == 1);
  CHECK(e.success_ratio == doctest::Approx(0.5));
  CHECK(e.weight == doctest::Approx(1.0));  // 2 transitions over 2 total
  // node ids are ranks of the representative strings
  CHECK(g.nodes[0].key < g.nodes[1].key);
  CHECK(g.trajectory_count == 2);
  CHECK(g.nodes[0].visit_count + g.nodes[1].visit_count == 4);
}

TEST_CASE("near-duplicate actions merge at theta 0.9, distinct ones do not") {
  std::vector<Trajectory> ts = {
      make_traj("t", "a", 0, Outcome::Success, {"click(text='Save changes now')"}),
      make_traj("t", "b", 0, Outcome::Success, {"click(text='Save changes now!')"}),
      make_traj("t", "c", 0, Outcome::Success, {"type(text='hello world')"}),
  };
  ConsensusGraph g = build_consensus(ptrs(ts), 0.9);
  CHECK(g.nodes.size() == 2);
  // the representative is the lexicographically least member string
  bool found = false;
  for (const auto& n : g.nodes)
    if (n.key == "click(text='Save changes now!')") {  // '!' sorts before '\''
      found = true;
      CHECK(n.members.size() == 2);
      CHECK(n.visit_count == 2);
    }
  CHECK(found);
}

TEST_CASE("merge classes equal brute-force transitive closure") {
  // token pool tuned so some pairs sit just above and below theta
  const std::vector<std::string> pool = {
      "click(text='checkout-button-one')", "click(text='checkout-button-two')",
      "click(text='checkout-button-twx')", "type(text='checkout-button-one')",
      "back()",  "refresh()", "wait(seconds='2')", "wait(seconds='3')",
  };
  std::mt19937_64 gen(99);
  for (double theta : {0.5, 0.7, 0.9, 1.0}) {
    for (int iter = 0; iter < 60; ++iter) {
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      std::uniform_int_distribution<int> count(1, 6);
      int n = count(gen);
      std::vector<std::string> keys;
      std::vector<int> steps;
      for (int i = 0; i < n; ++i) {
        keys.push_back(pool[pick(gen)]);
        steps.push_back(i % 3);
      }
      std::vector<std::u32string> cps;
      std::vector<std::pair<std::string, int>> rank;
      for (size_t i = 0; i < keys.size(); ++i) {
        cps.push_back(to_codepoints(keys[i]));
        rank.emplace_back(keys[i], static_cast<int>(i));
      }
      UnionFind uf(n);
      step_merge(cps, steps, theta, uf, rank);
      cross_step_merge(cps, theta, uf, rank);

      auto expected = closure_classes(keys, steps, theta);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CAPTURE(theta);
          CAPTURE(keys[i]);
          CAPTURE(keys[j]);
          CHECK((uf.find(i) == uf.find(j)) == (expected[i] == expected[j]));
        }
    }
  }
}

TEST_CASE("theta monotonicity: node count non-decreasing in theta") {
  SynthConfig cfg;
  cfg.seed = 31;
  cfg.n_tasks = 6;
  auto [d, truth] = generate(cfg);
  for (auto& t : d.trajectories)
    t.outcome = truth.outcomes.at(t.key()) ? Outcome::Success : Outcome::Failure;

  std::map<std::string, std::vector<const Trajectory*>> by_task;
  for (const auto& t : d.trajectories) by_task[t.task_id].push_back(&t);
  for (const auto& [task, trajs] : by_task) {
    size_t prev = 0;
    for (double theta : {0.5, 0.7, 0.9, 1.0}) {
      ConsensusGraph g = build_consensus(trajs, theta);
      CHECK(g.nodes.size() >= prev);
      prev = g.nodes.size();
    }
  }
}

TEST_CASE("edge count conservation and permutation invariance") {
  SynthConfig cfg;
  cfg.seed = 17;
  cfg.n_tasks = 5;
  cfg.runs_per_agent = 2;
  auto [d, truth] = generate(cfg);
  for (auto& t : d.trajectories)
    t.outcome = truth.outcomes.at(t.key()) ? Outcome::Success : Outcome::Failure;

  std::map<std::string, std::vector<const Trajectory*>> by_task;
  for (const auto& t : d.trajectories) by_task[t.task_id].push_back(&t);

  std::mt19937_64 gen(4);
  for (const auto& [task, trajs] : by_task) {
    ConsensusGraph g = build_consensus(trajs, 0.9);

    long expected_transitions = 0;
    for (const auto* t : trajs)
      expected_transitions += static_cast<long>(t->actions.size()) - 1;
    long total = 0;
    double weight_sum = 0;
    for (const auto& [key, e] : g.edges) {
      total += e.count;
      weight_sum += e.weight;
      CHECK(e.success_count + e.fail_count == e.count);
    }
    CHECK(total == expected_transitions);
    if (expected_transitions > 0) CHECK(weight_sum == doctest::Approx(1.0));

    std::string baseline = export_graph_json(g).dump(2);
    std::vector<const Trajectory*> shuffled = trajs;
    for (int s = 0; s < 20; ++s) {
      std::shuffle(shuffled.begin(), shuffled.end(), gen);
      CHECK(export_graph_json(build_consensus(shuffled, 0.9)).dump(2) == baseline);
    }
  }
}

TEST_CASE("self-loops from repeated actions are kept") {
  std::vector<Trajectory> ts = {
      make_traj("t", "a", 0, Outcome::Failure,
                {"refresh()", "refresh()", "refresh()"}),
  };
  ConsensusGraph g = build_consensus(ptrs(ts), 0.9);
  REQUIRE(g.nodes.size() == 1);
  REQUIRE(g.edges.size() == 1);
  const Edge& e = g.edges.begin()->second;
  CHECK(e.from == e.to);
  CHECK(e.count == 2);
  CHECK(g.nodes[0].visit_count == 3);
}

TEST_CASE("build_consensus input validation") {
  std::vector<Trajectory> mixed = {
      make_traj("t1", "a", 0, Outcome::Success, {"back()"}),
      make_traj("t2", "a", 0, Outcome::Success, {"back()"}),
  };
  CHECK_THROWS_AS(build_consensus(ptrs(mixed), 0.9), Error);

  std::vector<Trajectory> unjudged = {
      make_traj("t1", "a", 0, Outcome::Unjudged, {"back()"}),
  };
  CHECK_THROWS_AS(build_consensus(ptrs(unjudged), 0.9), Error);
}

TEST_CASE("json export round-trips through import") {
  std::vector<Trajectory> ts = {
      make_traj("t", "a", 0, Outcome::Success,
                {"goto(url='https://x.example')", "click(text='Buy')",
                 "click(text='Confirm')"}),
      make_traj("t", "b", 0, Outcome::Failure,
                {"goto(url='https://x.example')", "back()"}),
  };
  ConsensusGraph g = build_consensus(ptrs(ts), 0.9);
  auto j = export_graph_json(g);
  ConsensusGraph back = import_graph_json(j);
  CHECK(export_graph_json(back).dump(2) == j.dump(2));
  CHECK(back.task_id == g.task_id);
  CHECK(back.nodes.size() == g.nodes.size());
  CHECK(back.edges.size() == g.edges.size());
  CHECK(back.assignment == g.assignment);

  std::string dot = export_dot(g);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("goto(url='https://x.example')") != std::string::npos);
}
