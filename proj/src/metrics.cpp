#include "wge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "wge/error.hpp"

namespace wge {

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::map<std::string, std::vector<const Trajectory*>> by_task(const Dataset& d) {
  std::map<std::string, std::vector<const Trajectory*>> out;
  for (const auto& t : d.trajectories) out[t.task_id].push_back(&t);
  return out;
}

}  // namespace

std::vector<FrameworkStats> framework_stats(const Dataset& d) {
  struct Acc {
    long success = 0, failure = 0, actions = 0, necessary = 0;
    double steps = 0, confidence = 0;
    long runs = 0;
  };
  std::map<std::string, Acc> accs;
  for (const auto& t : d.trajectories) {
    if (t.outcome == Outcome::Unjudged)
      throw Error("UNJUDGED", "trajectory " + t.key() + " is unjudged");
    Acc& a = accs[t.agent_id];
    (t.outcome == Outcome::Success ? a.success : a.failure) += 1;
    a.steps += static_cast<double>(t.actions.size());
    a.confidence += t.judge_confidence.value_or(1.0);
    a.runs += 1;
    for (const auto& action : t.actions) {
      a.actions += 1;
      if (action.necessary) a.necessary += 1;
    }
  }
  std::vector<FrameworkStats> out;
  for (const auto& [agent, a] : accs) {
    FrameworkStats row;
    row.agent_id = agent;
    row.success_count = a.success;
    row.failure_count = a.failure;
    row.success_rate = static_cast<double>(a.success) / a.runs;
    row.avg_steps = a.steps / a.runs;
    row.avg_confidence = a.confidence / a.runs;
    row.necessity_rate =
        a.actions == 0 ? 0.0 : static_cast<double>(a.necessary) / a.actions;
    out.push_back(std::move(row));
  }
  return out;
}

FrameworkStats framework_totals(const std::vector<FrameworkStats>& rows) {
  FrameworkStats total;
  total.agent_id = "total";
  double steps = 0, confidence = 0, necessary = 0;
  long runs = 0;
  for (const auto& r : rows) {
    total.success_count += r.success_count;
    total.failure_count += r.failure_count;
    long n = r.success_count + r.failure_count;
    runs += n;
    steps += r.avg_steps * n;
    confidence += r.avg_confidence * n;
    necessary += r.necessity_rate * n;  // weighted by runs, reported per run
  }
  if (runs > 0) {
    total.success_rate = static_cast<double>(total.success_count) / runs;
    total.avg_steps = steps / runs;
    total.avg_confidence = confidence / runs;
    total.necessity_rate = necessary / runs;
  }
  return total;
}

std::string bucket_name(ComplexityBucket b) {
  switch (b) {
    case ComplexityBucket::Simple: return "simple";
    case ComplexityBucket::Medium: return "medium";
    case ComplexityBucket::Complex: return "complex";
    default: return "very_complex";
  }
}

ComplexityBucket ComplexityCuts::bucket(double complexity) const {
  if (complexity <= q1) return ComplexityBucket::Simple;
  if (complexity <= q2) return ComplexityBucket::Medium;
  if (complexity <= q3) return ComplexityBucket::Complex;
  return ComplexityBucket::VeryComplex;
}

ComplexityCuts quartile_cuts(std::vector<double> values) {
  ComplexityCuts cuts;
  if (values.empty()) return cuts;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(values.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  cuts.q1 = quantile(0.25);
  cuts.q2 = quantile(0.50);
  cuts.q3 = quantile(0.75);
  return cuts;
}

double graph_complexity(const ConsensusGraph& g) {
  if (g.trajectory_count == 0)
    throw Error("NO_TRAJECTORIES", "complexity undefined for empty graph " +
                                       g.task_id);
  return static_cast<double>(g.nodes.size()) *
         static_cast<double>(g.edges.size()) / g.trajectory_count;
}

NecessityBreakdown necessity_breakdown(
    const Dataset& d, const std::map<std::string, ComplexityBucket>* task_buckets) {
  NecessityBreakdown out;
  for (const auto& t : d.trajectories) {
    const size_t n = t.actions.size();
    const size_t first_len = (n + 2) / 3;       // ceil(n/3)
    const size_t final_len = n / 3;             // floor(n/3)
    for (size_t i = 0; i < n; ++i) {
      const auto& a = t.actions[i];
      bool necessary = a.necessary;
      auto tally = [&](RateCell& cell) {
        cell.total += 1;
        if (necessary) cell.hits += 1;
      };
      tally(out.overall);
      tally(out.by_kind[std::string(kind_name(a.kind))]);
      if (a.confidence < 0.85) tally(out.by_band["<0.85"]);
      else if (a.confidence <= 0.95) tally(out.by_band["0.85-0.95"]);
      else tally(out.by_band[">0.95"]);
      if (i < first_len) tally(out.by_phase["first"]);
      else if (i >= n - final_len) tally(out.by_phase["final"]);
      else tally(out.by_phase["middle"]);
      if (i < 3) tally(out.first_three_steps);
      if (task_buckets) {
        auto it = task_buckets->find(t.task_id);
        if (it != task_buckets->end())
          tally(out.by_bucket[bucket_name(it->second)]);
      }
    }
  }
  return out;
}

std::optional<InflationStats> step_inflation(
    const std::vector<const Trajectory*>& task_trajs,
    bool exclude_one_step_anomalies) {
  std::optional<long> shortest;
  for (const Trajectory* t : task_trajs) {
    if (t->outcome != Outcome::Success) continue;
    long len = static_cast<long>(t->actions.size());
    if (exclude_one_step_anomalies && len == 1) continue;
    if (!shortest || len < *shortest) shortest = len;
  }
  if (!shortest || *shortest == 0) return std::nullopt;

  InflationStats stats;
  stats.shortest_success_len = *shortest;
  double sum = 0.0;
  for (const Trajectory* t : task_trajs) {
    double ratio = static_cast<double>(t->actions.size()) / *shortest;
    stats.per_trajectory.emplace_back(t->key(), ratio);
    sum += ratio;
  }
  stats.mean = sum / static_cast<double>(task_trajs.size());
  return stats;
}

std::map<std::string, RateCell> length_bucket_success(const Dataset& d) {
  std::map<std::string, RateCell> out;
  for (const auto& t : d.trajectories) {
    if (t.outcome == Outcome::Unjudged)
      throw Error("UNJUDGED", "trajectory " + t.key() + " is unjudged");
    size_t len = t.actions.size();
    std::string bucket = len <= 5 ? "1-5" : (len <= 10 ? "6-10" : "11+");
    RateCell& cell = out[bucket];
    cell.total += 1;
    if (t.outcome == Outcome::Success) cell.hits += 1;
  }
  return out;
}

namespace {

std::optional<TaskAgreement> task_agreement(
    const std::vector<const Trajectory*>& trajs,
    const std::vector<std::string>& required_agents) {
  std::map<std::string, bool> solved;  // best-of-runs per agent
  for (const Trajectory* t : trajs) {
    bool& s = solved[t->agent_id];
    s = s || t->outcome == Outcome::Success;
  }
  for (const auto& agent : required_agents)
    if (!solved.count(agent)) return std::nullopt;  // not attempted by all
  bool all = true, none = true;
  for (const auto& [agent, s] : solved) {
    all = all && s;
    none = none && !s;
  }
  if (all) return TaskAgreement::AllSucceed;
  if (none) return TaskAgreement::AllFail;
  return TaskAgreement::Mixed;
}

}  // namespace

AgreementFractions cross_agent_agreement(const Dataset& d) {
  AgreementFractions out;
  long all_s = 0, all_f = 0, mixed = 0;
  for (const auto& [task, trajs] : by_task(d)) {
    auto agreement = task_agreement(trajs, d.agents);
    if (!agreement) continue;
    out.task_count += 1;
    switch (*agreement) {
      case TaskAgreement::AllSucceed: ++all_s; break;
      case TaskAgreement::AllFail: ++all_f; break;
      case TaskAgreement::Mixed: ++mixed; break;
    }
  }
  if (out.task_count > 0) {
    out.all_succeed = static_cast<double>(all_s) / out.task_count;
    out.all_fail = static_cast<double>(all_f) / out.task_count;
    out.mixed = static_cast<double>(mixed) / out.task_count;
  }
  return out;
}

double strategy_entropy(const ConsensusGraph& g) {
  std::map<std::vector<NodeId>, long> signatures;
  for (const auto& path : g.assignment) signatures[path] += 1;
  long total = 0;
  for (const auto& [sig, count] : signatures) total += count;
  if (total == 0) return 0.0;
  double entropy = 0.0;
  for (const auto& [sig, count] : signatures) {
    double p = static_cast<double>(count) / total;
    entropy -= p * std::log2(p);
  }
  return entropy;
}

std::map<int, RateCell> learning_curve(const Dataset& d) {
  long total_actions = 0;
  for (const auto& t : d.trajectories) total_actions += t.actions.size();
  if (total_actions == 0)
    throw Error("MISSING_NECESSITY", "dataset carries no necessity labels");
  std::map<int, RateCell> out;
  for (const auto& t : d.trajectories) {
    RateCell& cell = out[t.run_index];
    for (const auto& a : t.actions) {
      cell.total += 1;
      if (a.necessary) cell.hits += 1;
    }
  }
  return out;
}

std::vector<std::string> one_step_anomalies(const Dataset& d) {
  std::set<std::string> flagged;
  for (const auto& t : d.trajectories)
    if (t.outcome == Outcome::Success && t.actions.size() == 1)
      flagged.insert(t.task_id);
  return {flagged.begin(), flagged.end()};
}

std::vector<TaskStats> compute_task_stats(
    const Dataset& d, const std::map<std::string, ConsensusGraph>& graphs) {
  auto tasks = by_task(d);
  std::set<std::string> anomalies;
  for (const auto& id : one_step_anomalies(d)) anomalies.insert(id);

  std::vector<double> complexities;
  for (const auto& [task, g] : graphs)
    if (g.trajectory_count > 0) complexities.push_back(graph_complexity(g));
  ComplexityCuts cuts = quartile_cuts(complexities);

  std::vector<TaskStats> out;
  for (const auto& [task, trajs] : tasks) {
    TaskStats stats;
    stats.task_id = task;
    stats.one_step_anomaly = anomalies.count(task) > 0;
    auto git = graphs.find(task);
    if (git != graphs.end() && git->second.trajectory_count > 0) {
      stats.complexity = graph_complexity(git->second);
      stats.complexity_bucket = cuts.bucket(stats.complexity);
      stats.entropy_bits = strategy_entropy(git->second);
    }
    if (auto inflation = step_inflation(trajs, stats.one_step_anomaly)) {
      stats.shortest_success_len = inflation->shortest_success_len;
      stats.mean_inflation = inflation->mean;
    }
    auto agreement = task_agreement(trajs, {});
    stats.agreement = agreement.value_or(TaskAgreement::Mixed);
    out.push_back(std::move(stats));
  }
  return out;
}

// ---------------------------------------------------------------------------
// emitters
// ---------------------------------------------------------------------------

std::string framework_stats_csv(const std::vector<FrameworkStats>& rows) {
  std::string out =
      "agent_id,success,failure,success_rate,avg_steps,avg_confidence,necessity_rate\n";
  auto emit = [&](const FrameworkStats& r) {
    out += r.agent_id + "," + std::to_string(r.success_count) + "," +
           std::to_string(r.failure_count) + "," + fmt(r.success_rate) + "," +
           fmt(r.avg_steps) + "," + fmt(r.avg_confidence) + "," +
           fmt(r.necessity_rate) + "\n";
  };
  for (const auto& r : rows) emit(r);
  if (!rows.empty()) emit(framework_totals(rows));
  return out;
}

std::string task_stats_csv(const std::vector<TaskStats>& rows) {
  std::string out =
      "task_id,complexity,bucket,shortest_success_len,mean_inflation,"
      "one_step_anomaly,entropy_bits,agreement\n";
  for (const auto& r : rows) {
    out += r.task_id + "," + fmt(r.complexity) + "," +
           bucket_name(r.complexity_bucket) + ",";
    out += r.shortest_success_len ? std::to_string(*r.shortest_success_len) : "";
    out += ",";
    out += r.mean_inflation ? fmt(*r.mean_inflation) : "";
    out += ",";
    out += r.one_step_anomaly ? "true" : "false";
    out += "," + fmt(r.entropy_bits) + ",";
    switch (r.agreement) {
      case TaskAgreement::AllSucceed: out += "all_succeed"; break;
      case TaskAgreement::AllFail: out += "all_fail"; break;
      case TaskAgreement::Mixed: out += "mixed"; break;
    }
    out += "\n";
  }
  return out;
}

std::string necessity_breakdown_csv(const NecessityBreakdown& b) {
  std::string out = "dimension,cell,necessary,total,rate\n";
  auto emit = [&](const std::string& dim, const std::string& cell,
                  const RateCell& r) {
    out += dim + "," + cell + "," + std::to_string(r.hits) + "," +
           std::to_string(r.total) + "," + fmt(r.rate()) + "\n";
  };
  emit("overall", "all", b.overall);
  for (const auto& [k, r] : b.by_kind) emit("kind", k, r);
  for (const auto& [k, r] : b.by_band) emit("confidence_band", k, r);
  for (const auto& [k, r] : b.by_phase) emit("phase", k, r);
  for (const auto& [k, r] : b.by_bucket) emit("complexity_bucket", k, r);
  emit("phase", "first_three_steps", b.first_three_steps);
  return out;
}

std::string learning_curve_csv(const std::map<int, RateCell>& curve) {
  std::string out = "run_index,necessary,total,necessity_rate\n";
  for (const auto& [run, cell] : curve)
    out += std::to_string(run) + "," + std::to_string(cell.hits) + "," +
           std::to_string(cell.total) + "," + fmt(cell.rate()) + "\n";
  return out;
}

std::string classification_summary_csv(
    const std::map<std::string, ConsensusGraph>& graphs) {
  std::string out = "task_id,trap,critical,bottleneck,normal\n";
  for (const auto& [task, g] : graphs) {
    long counts[4] = {0, 0, 0, 0};
    for (const auto& [key, e] : g.edges)
      if (e.cls) counts[static_cast<int>(*e.cls)] += 1;
    out += task + "," + std::to_string(counts[0]) + "," +
           std::to_string(counts[1]) + "," + std::to_string(counts[2]) + "," +
           std::to_string(counts[3]) + "\n";
  }
  return out;
}

std::string markdown_report(const Dataset& d,
                            const std::vector<FrameworkStats>& frameworks,
                            const std::vector<TaskStats>& tasks,
                            const NecessityBreakdown& necessity,
                            const AgreementFractions& agreement,
                            const std::map<int, RateCell>& curve) {
  std::string out = "# Trajectory Analysis Report\n\n";
  out += "Tasks: " + std::to_string(d.tasks.size()) +
         ", trajectories: " + std::to_string(d.trajectories.size()) +
         ", agents: " + std::to_string(d.agents.size()) + "\n\n";

  out += "## Framework-level performance\n\n";
  if (frameworks.empty()) {
    out += "_no data_\n\n";
  } else {
    out += "| Framework | Success | Failure | Success Rate | Avg Steps | Avg. Confidence | Necessity Rate |\n";
    out += "|---|---|---|---|---|---|---|\n";
    auto row = [&](const FrameworkStats& r) {
      out += "| " + r.agent_id + " | " + std::to_string(r.success_count) +
             " | " + std::to_string(r.failure_count) + " | " +
             fmt(100.0 * r.success_rate, 2) + "% | " + fmt(r.avg_steps, 1) +
             " | " + fmt(r.avg_confidence, 3) + " | " +
             fmt(100.0 * r.necessity_rate, 1) + "% |\n";
    };
    for (const auto& r : frameworks) row(r);
    row(framework_totals(frameworks));
    out += "\n";
  }

  out += "## Necessity\n\n";
  if (necessity.overall.total == 0) {
    out += "_no data_\n\n";
  } else {
    out += "Overall necessity rate: " + fmt(100.0 * necessity.overall.rate(), 1) +
           "% of " + std::to_string(necessity.overall.total) + " actions\n\n";
    for (const auto& [kind, cell] : necessity.by_kind)
      out += "- " + kind + ": " + fmt(100.0 * cell.rate(), 1) + "%\n";
    out += "\n";
  }

  out += "## Cross-agent agreement\n\n";
  if (agreement.task_count == 0) {
    out += "_no data_\n\n";
  } else {
    out += "Over " + std::to_string(agreement.task_count) +
           " tasks attempted by every agent: " +
           fmt(100.0 * agreement.all_succeed, 1) + "% all succeed, " +
           fmt(100.0 * agreement.all_fail, 1) + "% all fail, " +
           fmt(100.0 * agreement.mixed, 1) + "% mixed\n\n";
  }

  out += "## Learning curve\n\n";
  if (curve.empty()) {
    out += "_no data_\n\n";
  } else {
    out += "| Run | Necessity Rate |\n|---|---|\n";
    for (const auto& [run, cell] : curve)
      out += "| " + std::to_string(run) + " | " + fmt(100.0 * cell.rate(), 1) +
             "% |\n";
    out += "\n";
  }

  long anomalies = 0;
  for (const auto& t : tasks)
    if (t.one_step_anomaly) ++anomalies;
  out += "## Tasks\n\n";
  out += std::to_string(tasks.size()) + " tasks analyzed, " +
         std::to_string(anomalies) + " with one-step success anomalies\n";
  return out;
}

}  // namespace wge
