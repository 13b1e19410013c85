#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "wge/error.hpp"
#include "wge/metrics.hpp"

using namespace wge;

namespace {

Trajectory make_traj(const std::string& task, const std::string& agent, int run,
                     Outcome outcome, int len, bool necessary_all = true) {
  Trajectory t;
  t.task_id = task;
  t.agent_id = agent;
  t.run_index = run;
  t.outcome = outcome;
  t.judge_confidence = 1.0;
  for (int i = 0; i < len; ++i) {
    auto a = parse_action("click(text='s" + std::to_string(i) + "')");
    a.necessary = necessary_all || (i % 2 == 0);
    t.actions.push_back(a);
  }
  return t;
}

Dataset with_tasks(std::vector<Trajectory> trajs) {
  Dataset d;
  for (const auto& t : trajs)
    if (!d.tasks.count(t.task_id)) {
      TaskSpec spec;
      spec.task_id = t.task_id;
      spec.intent = "intent for " + t.task_id;
      d.tasks.emplace(spec.task_id, spec);
    }
  d.trajectories = std::move(trajs);
  d.rebuild_agent_registry();
  return d;
}

ConsensusGraph graph_for(const Dataset& d, const std::string& task) {
  std::vector<const Trajectory*> trajs;
  for (const auto& t : d.trajectories)
    if (t.task_id == task) trajs.push_back(&t);
  return build_consensus(trajs, 0.9);
}

}  // namespace

TEST_CASE("graph complexity formula and fixture") {
  ConsensusGraph g;
  g.task_id = "t";
  g.nodes.resize(10);
  for (int i = 0; i < 12; ++i) {
    Edge e;
    e.from = i % 10;
    e.to = (i * 3 + 1) % 10;
    g.edges[{e.from, e.to + (i >= 10 ? 1 : 0)}] = e;
  }
  REQUIRE(g.edges.size() == 12);
  g.trajectory_count = 4;
  CHECK(graph_complexity(g) == 30.0);

  ConsensusGraph empty;
  CHECK_THROWS_AS(graph_complexity(empty), Error);
}

TEST_CASE("quartile buckets") {
  auto cuts = quartile_cuts({1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(cuts.bucket(1.0) == ComplexityBucket::Simple);
  CHECK(cuts.bucket(4.0) == ComplexityBucket::Medium);
  CHECK(cuts.bucket(6.0) == ComplexityBucket::Complex);
  CHECK(cuts.bucket(100.0) == ComplexityBucket::VeryComplex);
  CHECK(bucket_name(ComplexityBucket::Simple) == "simple");
  CHECK(bucket_name(ComplexityBucket::VeryComplex) == "very_complex");
}

TEST_CASE("strategy entropy fixtures") {
  ConsensusGraph g;
  g.task_id = "t";
  // all four trajectories share one path: 0 bits
  g.assignment = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
  CHECK(strategy_entropy(g) == doctest::Approx(0.0).epsilon(1e-12));
  // two equally likely paths: 1 bit
  g.assignment = {{0, 1}, {0, 2}, {0, 1}, {0, 2}};
  CHECK(strategy_entropy(g) == doctest::Approx(1.0).epsilon(1e-12));
  // distribution {1/2, 1/4, 1/4}: 1.5 bits
  g.assignment = {{0}, {0}, {1}, {2}};
  CHECK(strategy_entropy(g) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("step inflation fixtures") {
  // 15-step success vs 4-step shortest: mean over both trajectories
  std::vector<Trajectory> ts = {
      make_traj("t", "a", 0, Outcome::Success, 4),
      make_traj("t", "b", 0, Outcome::Success, 15),
  };
  std::vector<const Trajectory*> p;
  for (const auto& t : ts) p.push_back(&t);
  auto stats = step_inflation(p, false);
  REQUIRE(stats);
  CHECK(stats->shortest_success_len == 4);
  CHECK(stats->per_trajectory[1].second == doctest::Approx(15.0 / 4.0));
  CHECK(stats->per_trajectory[1].second == 3.75);

  // lengths {6, 9} against shortest 6 -> mean 1.25? no: (1.0 + 1.5)/2 = 1.25
  std::vector<Trajectory> ts2 = {
      make_traj("t", "a", 0, Outcome::Success, 6),
      make_traj("t", "b", 0, Outcome::Success, 9),
  };
  std::vector<const Trajectory*> p2{&ts2[0], &ts2[1]};
  auto s2 = step_inflation(p2, false);
  REQUIRE(s2);
  CHECK(s2->mean == doctest::Approx((1.0 + 1.5) / 2));

  // one-step anomalies can be excluded from the baseline
  std::vector<Trajectory> ts3 = {
      make_traj("t", "a", 0, Outcome::Success, 1),
      make_traj("t", "b", 0, Outcome::Success, 6),
      make_traj("t", "c", 0, Outcome::Success, 9),
  };
  std::vector<const Trajectory*> p3{&ts3[0], &ts3[1], &ts3[2]};
  auto incl = step_inflation(p3, false);
  auto excl = step_inflation(p3, true);
  REQUIRE(incl);
  REQUIRE(excl);
  CHECK(incl->shortest_success_len == 1);
  CHECK(excl->shortest_success_len == 6);

  // all failures: no baseline
  std::vector<Trajectory> ts4 = {make_traj("t", "a", 0, Outcome::Failure, 3)};
  std::vector<const Trajectory*> p4{&ts4[0]};
  CHECK_FALSE(step_inflation(p4, false).has_value());
}

TEST_CASE("framework stats and totals") {
  Dataset d = with_tasks({
      make_traj("t1", "alpha", 0, Outcome::Success, 4),
      make_traj("t1", "alpha", 1, Outcome::Failure, 6),
      make_traj("t1", "beta", 0, Outcome::Success, 2, false),
  });
  auto rows = framework_stats(d);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].agent_id == "alpha");
  CHECK(rows[0].success_count == 1);
  CHECK(rows[0].failure_count == 1);
  CHECK(rows[0].success_rate == doctest::Approx(0.5));
  CHECK(rows[0].avg_steps == doctest::Approx(5.0));
  CHECK(rows[0].necessity_rate == doctest::Approx(1.0));
  CHECK(rows[1].agent_id == "beta");
  CHECK(rows[1].necessity_rate == doctest::Approx(0.5));

  auto total = framework_totals(rows);
  CHECK(total.success_count == 2);
  CHECK(total.failure_count == 1);
  CHECK(total.success_rate == doctest::Approx(2.0 / 3));
  CHECK(total.avg_steps == doctest::Approx(4.0));

  d.trajectories[0].outcome = Outcome::Unjudged;
  CHECK_THROWS_AS(framework_stats(d), Error);
}

TEST_CASE("necessity breakdown phases and bands") {
  // 9 steps: first phase = ceil(9/3) = 3 steps, final = floor(9/3) = 3
  Trajectory t = make_traj("t1", "a", 0, Outcome::Success, 9);
  for (int i = 0; i < 9; ++i) {
    t.actions[i].necessary = i < 3;      // only the first phase is necessary
    t.actions[i].confidence = i < 3 ? 0.99 : (i < 6 ? 0.9 : 0.5);
  }
  Dataset d = with_tasks({t});
  auto b = necessity_breakdown(d);
  CHECK(b.overall.total == 9);
  CHECK(b.overall.hits == 3);
  CHECK(b.by_phase.at("first").rate() == doctest::Approx(1.0));
  CHECK(b.by_phase.at("middle").rate() == doctest::Approx(0.0));
  CHECK(b.by_phase.at("final").rate() == doctest::Approx(0.0));
  CHECK(b.first_three_steps.rate() == doctest::Approx(1.0));
  CHECK(b.by_band.at(">0.95").rate() == doctest::Approx(1.0));
  CHECK(b.by_band.at("0.85-0.95").rate() == doctest::Approx(0.0));
  CHECK(b.by_band.at("<0.85").rate() == doctest::Approx(0.0));
  CHECK(b.by_kind.at("click").total == 9);
}

TEST_CASE("length bucket success rates") {
  Dataset d = with_tasks({
      make_traj("t1", "a", 0, Outcome::Success, 3),
      make_traj("t1", "a", 1, Outcome::Failure, 5),
      make_traj("t2", "a", 0, Outcome::Success, 8),
      make_traj("t3", "a", 0, Outcome::Failure, 12),
  });
  auto buckets = length_bucket_success(d);
  CHECK(buckets.at("1-5").rate() == doctest::Approx(0.5));
  CHECK(buckets.at("6-10").rate() == doctest::Approx(1.0));
  CHECK(buckets.at("11+").rate() == doctest::Approx(0.0));
}

TEST_CASE("cross-agent agreement with best-of-runs") {
  Dataset d = with_tasks({
      // t1: both agents eventually succeed
      make_traj("t1", "a", 0, Outcome::Failure, 3),
      make_traj("t1", "a", 1, Outcome::Success, 3),
      make_traj("t1", "b", 0, Outcome::Success, 3),
      // t2: both fail
      make_traj("t2", "a", 0, Outcome::Failure, 3),
      make_traj("t2", "b", 0, Outcome::Failure, 3),
      // t3: mixed
      make_traj("t3", "a", 0, Outcome::Success, 3),
      make_traj("t3", "b", 0, Outcome::Failure, 3),
      // t4: not attempted by b, excluded
      make_traj("t4", "a", 0, Outcome::Success, 3),
  });
  auto f = cross_agent_agreement(d);
  CHECK(f.task_count == 3);
  CHECK(f.all_succeed == doctest::Approx(1.0 / 3));
  CHECK(f.all_fail == doctest::Approx(1.0 / 3));
  CHECK(f.mixed == doctest::Approx(1.0 / 3));
}

TEST_CASE("learning curve and one-step anomalies") {
  Dataset d = with_tasks({
      make_traj("t1", "a", 0, Outcome::Success, 4, false),
      make_traj("t1", "a", 1, Outcome::Success, 4),
      make_traj("t2", "a", 0, Outcome::Success, 1),
      make_traj("t3", "a", 0, Outcome::Failure, 1),
  });
  auto curve = learning_curve(d);
  CHECK(curve.at(0).total == 6);
  CHECK(curve.at(0).rate() == doctest::Approx(4.0 / 6));
  CHECK(curve.at(1).rate() == doctest::Approx(1.0));

  auto anomalies = one_step_anomalies(d);
  CHECK(anomalies == std::vector<std::string>{"t2"});  // t3 failed, not an anomaly

  Dataset empty;
  CHECK_THROWS_AS(learning_curve(empty), Error);
}

TEST_CASE("csv and markdown emitters are stable and well-formed") {
  Dataset d = with_tasks({
      make_traj("t1", "a", 0, Outcome::Success, 3),
      make_traj("t1", "b", 0, Outcome::Failure, 5),
  });
  std::map<std::string, ConsensusGraph> graphs;
  graphs.emplace("t1", graph_for(d, "t1"));

  auto rows = framework_stats(d);
  auto tasks = compute_task_stats(d, graphs);
  auto necessity = necessity_breakdown(d);
  auto agreement = cross_agent_agreement(d);
  auto curve = learning_curve(d);

  std::string fw_csv = framework_stats_csv(rows);
  CHECK(fw_csv.rfind("agent_id,", 0) == 0);
  CHECK(fw_csv.find("\ntotal,") != std::string::npos);
  CHECK(framework_stats_csv(rows) == fw_csv);  // deterministic

  std::string md = markdown_report(d, rows, tasks, necessity, agreement, curve);
  CHECK(md.find("| Framework | Success | Failure | Success Rate | Avg Steps | "
                "Avg. Confidence | Necessity Rate |") != std::string::npos);

  CHECK(task_stats_csv(tasks).rfind("task_id,", 0) == 0);
  CHECK(necessity_breakdown_csv(necessity).find("first") != std::string::npos);
  CHECK(classification_summary_csv(graphs).rfind("task_id,", 0) == 0);
  CHECK(learning_curve_csv(curve).rfind("run_index,", 0) == 0);

  // empty dataset renders the no-data report without throwing
  Dataset empty;
  std::string empty_md = markdown_report(empty, {}, {}, NecessityBreakdown{},
                                         AgreementFractions{}, {});
  CHECK(empty_md.find("_no data_") != std::string::npos);
}
