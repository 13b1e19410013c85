#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wge/actions.hpp"

namespace wge {

struct RawAction {
  std::string description;
  std::string url;
  int step_index = 0;
  // optional annotation side-channel carried by the trajectory schema
  std::optional<bool> necessary;
  std::optional<double> confidence;
  std::optional<int> pre;
};

struct TaskReference {
  std::optional<std::string> exact_match;
  std::vector<std::string> must_include;
  std::vector<std::string> fuzzy_match;

  bool empty() const {
    return !exact_match && must_include.empty() && fuzzy_match.empty();
  }
};

struct TaskSpec {
  std::string task_id;
  std::string intent;
  TaskReference reference;
};

enum class Outcome { Success, Failure, Unjudged };

std::string outcome_name(Outcome o);

struct Trajectory {
  std::string task_id;
  std::string agent_id;
  int run_index = 0;
  std::vector<CanonicalAction> actions;
  Outcome outcome = Outcome::Unjudged;
  std::optional<double> judge_confidence;

  // "task/agent#run", used in every error and report that names a run.
  std::string key() const;
  // The last action stands in for the agent's final message.
  std::string final_message() const;
};

struct Dataset {
  std::map<std::string, TaskSpec> tasks;
  std::vector<Trajectory> trajectories;
  std::vector<std::string> agents;  // sorted, distinct

  void rebuild_agent_registry();
};

// Trajectories whose action descriptions are still free text; produced by
// load_raw_dataset and consumed by the annotation module's canonicalizer.
struct RawTrajectory {
  std::string task_id;
  std::string agent_id;
  std::optional<int> run_index;
  Outcome outcome = Outcome::Unjudged;
  std::optional<double> judge_confidence;
  std::vector<RawAction> actions;
  std::string source_file;
};

struct RawDataset {
  std::map<std::string, TaskSpec> tasks;
  std::vector<RawTrajectory> trajectories;
};

// Directory layout: <path>/tasks/*.json and <path>/trajectories/*.json,
// iterated in sorted filename order. run_index defaults to ingestion order
// within (task, agent) when absent from the file.
RawDataset load_raw_dataset(const std::filesystem::path& path);

// Strict load: every action description must already be a canonical call.
Dataset load_dataset(const std::filesystem::path& path);

void save_dataset(const Dataset& d, const std::filesystem::path& path);

struct Violation {
  std::string code;
  std::string location;
  std::string message;
};

// Codes: DANGLING_TASK, DUP_RUN, EMPTY_TRAJ, BAD_CONFIDENCE, CONFIDENCE_STATE.
std::vector<Violation> validate_dataset(const Dataset& d);

// Splits judged trajectories into (success, fail), preserving input order.
// Throws UNJUDGED if any trajectory is unjudged.
std::pair<std::vector<const Trajectory*>, std::vector<const Trajectory*>>
partition_by_outcome(const Dataset& d);

}  // namespace wge
