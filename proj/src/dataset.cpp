#include "wge/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"
#include "wge/error.hpp"

namespace wge {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Failure: return "failure";
    default: return "unjudged";
  }
}

std::string Trajectory::key() const {
  return task_id + "/" + agent_id + "#" + std::to_string(run_index);
}

std::string Trajectory::final_message() const {
  if (actions.empty()) return "";
  return canonical_string(actions.back());
}

void Dataset::rebuild_agent_registry() {
  std::set<std::string> ids;
  for (const auto& t : trajectories) ids.insert(t.agent_id);
  agents.assign(ids.begin(), ids.end());
}

namespace {

ordered_json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("IO", "cannot open " + file.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("BAD_JSON", file.string() + ": " + e.what());
  }
}

std::vector<fs::path> sorted_json_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

template <typename T>
T require_field(const ordered_json& j, const char* key, const fs::path& file) {
  if (!j.contains(key))
    throw Error("SCHEMA", file.string() + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error("SCHEMA",
                file.string() + ": field \"" + key + "\" has the wrong type");
  }
}

TaskSpec parse_task(const ordered_json& j, const fs::path& file) {
  TaskSpec task;
  task.task_id = require_field<std::string>(j, "task_id", file);
  task.intent = require_field<std::string>(j, "intent", file);
  if (j.contains("reference") && !j.at("reference").is_null()) {
    const auto& r = j.at("reference");
    if (r.contains("exact_match") && !r.at("exact_match").is_null())
      task.reference.exact_match = r.at("exact_match").get<std::string>();
    if (r.contains("must_include"))
      task.reference.must_include = r.at("must_include").get<std::vector<std::string>>();
    if (r.contains("fuzzy_match"))
      task.reference.fuzzy_match = r.at("fuzzy_match").get<std::vector<std::string>>();
  }
  return task;
}

}  // namespace

RawDataset load_raw_dataset(const fs::path& path) {
  if (!fs::exists(path))
    throw Error("IO", "dataset directory not found: " + path.string());
  RawDataset out;

  for (const auto& file : sorted_json_files(path / "tasks")) {
    TaskSpec task = parse_task(read_json_file(file), file);
    if (out.tasks.count(task.task_id))
      throw Error("DUP_TASK", file.string() + ": duplicate task_id \"" +
                                  task.task_id + "\"");
    out.tasks.emplace(task.task_id, std::move(task));
  }

  std::map<std::pair<std::string, std::string>, int> next_run;
  for (const auto& file : sorted_json_files(path / "trajectories")) {
    ordered_json j = read_json_file(file);
    RawTrajectory traj;
    traj.source_file = file.string();
    traj.task_id = require_field<std::string>(j, "task_id", file);
    traj.agent_id = require_field<std::string>(j, "agent_id", file);
    if (j.contains("run_index") && !j.at("run_index").is_null())
      traj.run_index = require_field<int>(j, "run_index", file);
    if (j.contains("outcome") && !j.at("outcome").is_null()) {
      std::string o = j.at("outcome").get<std::string>();
      if (o == "success") traj.outcome = Outcome::Success;
      else if (o == "failure") traj.outcome = Outcome::Failure;
      else throw Error("SCHEMA", file.string() + ": bad outcome \"" + o + "\"");
    }
    if (j.contains("judge_confidence") && !j.at("judge_confidence").is_null())
      traj.judge_confidence = j.at("judge_confidence").get<double>();
    if (!j.contains("actions") || !j.at("actions").is_array())
      throw Error("SCHEMA", file.string() + ": missing field \"actions\"");
    for (const auto& aj : j.at("actions")) {
      RawAction a;
      a.step_index = require_field<int>(aj, "step", file);
      a.description = require_field<std::string>(aj, "description", file);
      a.url = require_field<std::string>(aj, "url", file);
      if (aj.contains("necessary") && !aj.at("necessary").is_null())
        a.necessary = aj.at("necessary").get<bool>();
      if (aj.contains("confidence") && !aj.at("confidence").is_null())
        a.confidence = aj.at("confidence").get<double>();
      if (aj.contains("pre") && !aj.at("pre").is_null())
        a.pre = aj.at("pre").get<int>();
      traj.actions.push_back(std::move(a));
    }
    if (!out.tasks.count(traj.task_id))
      throw Error("DANGLING_TASK", file.string() + ": unknown task_id \"" +
                                       traj.task_id + "\"");
    if (!traj.run_index)
      traj.run_index = next_run[{traj.task_id, traj.agent_id}];
    next_run[{traj.task_id, traj.agent_id}] =
        std::max(next_run[{traj.task_id, traj.agent_id}], *traj.run_index + 1);
    out.trajectories.push_back(std::move(traj));
  }
  return out;
}

Dataset load_dataset(const fs::path& path) {
  RawDataset raw = load_raw_dataset(path);
  Dataset out;
  out.tasks = std::move(raw.tasks);
  for (auto& rt : raw.trajectories) {
    Trajectory traj;
    traj.task_id = rt.task_id;
    traj.agent_id = rt.agent_id;
    traj.run_index = *rt.run_index;
    traj.outcome = rt.outcome;
    traj.judge_confidence = rt.judge_confidence;
    for (size_t i = 0; i < rt.actions.size(); ++i) {
      const RawAction& ra = rt.actions[i];
      if (ra.step_index != static_cast<int>(i))
        throw Error("SCHEMA", rt.source_file + ": step " + std::to_string(ra.step_index) +
                                  " out of order at position " + std::to_string(i));
      CanonicalAction a;
      try {
        a = parse_action(ra.description);
      } catch (const Error& e) {
        throw Error("NOT_CANONICAL",
                    rt.source_file + ": action " + std::to_string(i) + ": " + e.what());
      }
      a.source_url = ra.url;
      if (ra.necessary) a.necessary = *ra.necessary;
      if (ra.confidence) a.confidence = *ra.confidence;
      if (ra.pre) a.pre_dependency = *ra.pre;
      traj.actions.push_back(std::move(a));
    }
    out.trajectories.push_back(std::move(traj));
  }
  out.rebuild_agent_registry();
  return out;
}

void save_dataset(const Dataset& d, const fs::path& path) {
  fs::create_directories(path / "tasks");
  fs::create_directories(path / "trajectories");
  for (const auto& [id, task] : d.tasks) {
    ordered_json j;
    j["task_id"] = task.task_id;
    j["intent"] = task.intent;
    ordered_json ref;
    ref["exact_match"] =
        task.reference.exact_match ? ordered_json(*task.reference.exact_match)
                                   : ordered_json(nullptr);
    ref["must_include"] = task.reference.must_include;
    ref["fuzzy_match"] = task.reference.fuzzy_match;
    j["reference"] = ref;
    std::ofstream out(path / "tasks" / (id + ".json"));
    out << j.dump(2) << "\n";
  }
  for (const auto& traj : d.trajectories) {
    ordered_json j;
    j["task_id"] = traj.task_id;
    j["agent_id"] = traj.agent_id;
    j["run_index"] = traj.run_index;
    j["outcome"] = traj.outcome == Outcome::Unjudged
                       ? ordered_json(nullptr)
                       : ordered_json(outcome_name(traj.outcome));
    if (traj.judge_confidence) j["judge_confidence"] = *traj.judge_confidence;
    ordered_json actions = ordered_json::array();
    for (size_t i = 0; i < traj.actions.size(); ++i) {
      const auto& a = traj.actions[i];
      ordered_json aj;
      aj["step"] = static_cast<int>(i);
      aj["description"] = canonical_string(a);
      aj["url"] = a.source_url;
      aj["necessary"] = a.necessary;
      aj["confidence"] = a.confidence;
      if (a.pre_dependency) aj["pre"] = *a.pre_dependency;
      actions.push_back(std::move(aj));
    }
    j["actions"] = std::move(actions);
    std::string name = traj.task_id + "__" + traj.agent_id + "__" +
                       std::to_string(traj.run_index) + ".json";
    std::ofstream out(path / "trajectories" / name);
    out << j.dump(2) << "\n";
  }
}

std::vector<Violation> validate_dataset(const Dataset& d) {
  std::vector<Violation> out;
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& traj : d.trajectories) {
    if (!d.tasks.count(traj.task_id))
      out.push_back({"DANGLING_TASK", traj.key(),
                     "references unknown task \"" + traj.task_id + "\""});
    if (!seen.insert({traj.task_id, traj.agent_id, traj.run_index}).second)
      out.push_back({"DUP_RUN", traj.key(), "duplicate (task, agent, run) triple"});
    if (traj.actions.empty())
      out.push_back({"EMPTY_TRAJ", traj.key(), "trajectory has no actions"});
    for (size_t i = 0; i < traj.actions.size(); ++i) {
      double c = traj.actions[i].confidence;
      if (c < 0.0 || c > 1.0)
        out.push_back({"BAD_CONFIDENCE", traj.key() + ":" + std::to_string(i),
                       "confidence outside [0,1]"});
    }
    bool judged = traj.outcome != Outcome::Unjudged;
    if (judged != traj.judge_confidence.has_value())
      out.push_back({"CONFIDENCE_STATE", traj.key(),
                     "judge_confidence must be present iff judged"});
  }
  return out;
}

std::pair<std::vector<const Trajectory*>, std::vector<const Trajectory*>>
partition_by_outcome(const Dataset& d) {
  std::vector<const Trajectory*> success, fail;
  for (const auto& traj : d.trajectories) {
    switch (traj.outcome) {
      case Outcome::Success: success.push_back(&traj); break;
      case Outcome::Failure: fail.push_back(&traj); break;
      case Outcome::Unjudged:
        throw Error("UNJUDGED", "trajectory " + traj.key() + " is unjudged");
    }
  }
  return {std::move(success), std::move(fail)};
}

}  // namespace wge
