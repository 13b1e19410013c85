#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wge/consensus.hpp"
#include "wge/dataset.hpp"

namespace wge {

// hits/total counter used for every rate in this module
struct RateCell {
  long hits = 0;
  long total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(hits) / total; }
};

struct FrameworkStats {
  std::string agent_id;
  long success_count = 0;
  long failure_count = 0;
  double success_rate = 0.0;
  double avg_steps = 0.0;
  double avg_confidence = 0.0;  // mean judge confidence
  double necessity_rate = 0.0;
};

// One row per agent with >= 1 trajectory, sorted by agent_id.
// Throws UNJUDGED on unjudged data.
std::vector<FrameworkStats> framework_stats(const Dataset& d);
FrameworkStats framework_totals(const std::vector<FrameworkStats>& rows);

enum class ComplexityBucket { Simple, Medium, Complex, VeryComplex };
std::string bucket_name(ComplexityBucket b);

// Quantile cuts over the dataset's complexity distribution (quartiles by
// default). Values <= q1 are Simple, <= q2 Medium, <= q3 Complex.
struct ComplexityCuts {
  double q1 = 0, q2 = 0, q3 = 0;
  ComplexityBucket bucket(double complexity) const;
};
ComplexityCuts quartile_cuts(std::vector<double> values);

// nodes * edges / trajectories. Throws NO_TRAJECTORIES on an empty graph.
double graph_complexity(const ConsensusGraph& g);

struct NecessityBreakdown {
  std::map<std::string, RateCell> by_kind;
  std::map<std::string, RateCell> by_band;    // "<0.85", "0.85-0.95", ">0.95"
  std::map<std::string, RateCell> by_phase;   // "first", "middle", "final"
  std::map<std::string, RateCell> by_bucket;  // complexity buckets
  RateCell first_three_steps;
  RateCell overall;
};

// Phases split each trajectory into step-index thirds: the first phase is
// the first ceil(n/3) steps, the final phase the last floor(n/3).
NecessityBreakdown necessity_breakdown(
    const Dataset& d,
    const std::map<std::string, ComplexityBucket>* task_buckets = nullptr);

struct InflationStats {
  long shortest_success_len = 0;
  double mean = 0.0;
  std::vector<std::pair<std::string, double>> per_trajectory;  // key, ratio
};

// Absent when the task has no successful trajectory (or none left after
// excluding one-step anomalies).
std::optional<InflationStats> step_inflation(
    const std::vector<const Trajectory*>& task_trajs,
    bool exclude_one_step_anomalies);

// Success rate per length bucket {1-5, 6-10, 11+}; empty buckets absent.
std::map<std::string, RateCell> length_bucket_success(const Dataset& d);

struct AgreementFractions {
  double all_succeed = 0.0;
  double all_fail = 0.0;
  double mixed = 0.0;
  long task_count = 0;  // tasks attempted by every registered agent
};

// Best-of-runs semantics: an agent solves a task if any run succeeds.
AgreementFractions cross_agent_agreement(const Dataset& d);

// Shannon entropy (bits) of the distribution of distinct node-id path
// signatures in the graph's assignment.
double strategy_entropy(const ConsensusGraph& g);

// Necessity rate per run_index. Throws MISSING_NECESSITY when the dataset
// carries no actions (and therefore no labels).
std::map<int, RateCell> learning_curve(const Dataset& d);

// task_ids with at least one successful length-1 trajectory, sorted.
std::vector<std::string> one_step_anomalies(const Dataset& d);

enum class TaskAgreement { AllSucceed, AllFail, Mixed };

struct TaskStats {
  std::string task_id;
  double complexity = 0.0;
  ComplexityBucket complexity_bucket = ComplexityBucket::Simple;
  std::optional<long> shortest_success_len;
  std::optional<double> mean_inflation;
  bool one_step_anomaly = false;
  double entropy_bits = 0.0;
  TaskAgreement agreement = TaskAgreement::Mixed;
};

std::vector<TaskStats> compute_task_stats(
    const Dataset& d, const std::map<std::string, ConsensusGraph>& graphs);

// CSV / markdown emitters; all numeric fields printed with fixed precision
// so repeated runs are byte-identical.
std::string framework_stats_csv(const std::vector<FrameworkStats>& rows);
std::string task_stats_csv(const std::vector<TaskStats>& rows);
std::string necessity_breakdown_csv(const NecessityBreakdown& b);
std::string learning_curve_csv(const std::map<int, RateCell>& curve);
std::string classification_summary_csv(
    const std::map<std::string, ConsensusGraph>& graphs);
std::string markdown_report(const Dataset& d,
                            const std::vector<FrameworkStats>& frameworks,
                            const std::vector<TaskStats>& tasks,
                            const NecessityBreakdown& necessity,
                            const AgreementFractions& agreement,
                            const std::map<int, RateCell>& curve);

}  // namespace wge
