#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "wge/dataset.hpp"

namespace wge {

struct SynthConfig {
  uint64_t seed = 7;
  int n_tasks = 20;
  int n_agents = 3;
  int runs_per_agent = 2;
  int optimal_len_min = 2;
  int optimal_len_max = 6;
  double redundancy_rate = 0.3;
  std::vector<double> agent_success_bias;  // defaults to 0.5 per agent
  double anomaly_rate = 0.1;
  double paraphrase_rate = 0.1;

  void validate() const;  // throws BAD_CONFIG
};

struct GroundTruth {
  std::map<std::string, std::vector<std::string>> optimal_paths;  // task -> calls
  std::map<std::string, bool> outcomes;                // trajectory key -> success
  std::map<std::string, std::vector<bool>> necessity;  // trajectory key -> labels
  std::set<std::string> anomaly_tasks;
};

// Deterministic for a fixed config: successful trajectories embed the
// optimal path with geometric(redundancy_rate) filler after each step,
// failures follow a random optimal prefix and then diverge. Only optimal
// actions carry necessary=true. Emitted outcomes are left unjudged; the
// mock judge recovers the planted outcome from the answer token.
std::pair<Dataset, GroundTruth> generate(const SynthConfig& cfg);

nlohmann::ordered_json ground_truth_json(const GroundTruth& t);
GroundTruth ground_truth_from_json(const nlohmann::ordered_json& j);

struct VerifyEntry {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;  // 0 means exact
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  bool all_pass() const;
  std::string to_string() const;
};

// Compares a judged dataset's recovered statistics against the planted
// ground truth: outcomes, per-agent success rates (vs bias), necessity
// rate, anomaly task set, agreement fractions, and mean inflation of
// successful trajectories vs the 1/(1-redundancy) expectation.
VerifyReport verify_against_truth(const Dataset& judged, const GroundTruth& truth,
                                  const SynthConfig& cfg);

}  // namespace wge
