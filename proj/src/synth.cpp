#include "wge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wge/error.hpp"
#include "wge/metrics.hpp"
#include "wge/rng.hpp"

namespace wge {

using nlohmann::ordered_json;

void SynthConfig::validate() const {
  if (n_tasks <= 0 || n_agents <= 0 || runs_per_agent <= 0)
    throw Error("BAD_CONFIG", "n_tasks, n_agents and runs_per_agent must be positive");
  if (optimal_len_min < 2 || optimal_len_max < optimal_len_min)
    throw Error("BAD_CONFIG", "optimal length range must satisfy 2 <= min <= max");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(redundancy_rate) || !unit(anomaly_rate) || !unit(paraphrase_rate))
    throw Error("BAD_CONFIG", "rates must lie in [0,1]");
  if (redundancy_rate >= 1.0)
    throw Error("BAD_CONFIG", "redundancy_rate must be < 1");
  if (!agent_success_bias.empty() &&
      agent_success_bias.size() != static_cast<size_t>(n_agents))
    throw Error("BAD_CONFIG", "agent_success_bias must have one entry per agent");
  for (double b : agent_success_bias)
    if (!unit(b)) throw Error("BAD_CONFIG", "agent bias outside [0,1]");
}

namespace {

std::string padded(const char* prefix, int index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, index);
  return buf;
}

CanonicalAction make_call(const std::string& text) { return parse_action(text); }

// single-character substitution inside the longest parameter value; the
// tokens are long enough that one edit keeps similarity above 0.9
CanonicalAction paraphrase(const CanonicalAction& a, Rng& rng) {
  CanonicalAction out = a;
  if (out.params.empty()) return out;
  auto& value = std::max_element(out.params.begin(), out.params.end(),
                                 [](const auto& x, const auto& y) {
                                   return x.second.size() < y.second.size();
                                 })
                    ->second;
  if (value.size() < 4) return out;
  size_t pos = rng.uniform(value.size());
  char replacement = "abcdefghijklmnopqrstuvwxyz"[rng.uniform(26)];
  if (value[pos] == replacement) replacement = replacement == 'z' ? 'a' : replacement + 1;
  value[pos] = replacement;
  return out;
}

}  // namespace

std::pair<Dataset, GroundTruth> generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Dataset data;
  GroundTruth truth;

  std::vector<double> biases = cfg.agent_success_bias;
  if (biases.empty()) biases.assign(cfg.n_agents, 0.5);

  std::vector<std::string> agent_ids;
  for (int a = 0; a < cfg.n_agents; ++a)
    agent_ids.push_back(padded("agent-", a, 2));

  for (int ti = 0; ti < cfg.n_tasks; ++ti) {
    const std::string task_id = padded("task-", ti, 3);
    const bool anomaly = rng.bernoulli(cfg.anomaly_rate);
    const int optimal_len = anomaly ? 1 : rng.range(cfg.optimal_len_min, cfg.optimal_len_max);
    const std::string answer = "ANSWER-" + rng.token(10);
    const std::string site = "https://site-" + rng.token(6) + ".example";

    TaskSpec task;
    task.task_id = task_id;
    task.intent = "Complete task " + task_id + " and report the answer.";
    task.reference.exact_match = answer;
    data.tasks.emplace(task_id, task);

    std::vector<CanonicalAction> optimal;
    if (optimal_len == 1) {
      optimal.push_back(make_call("click(text='" + answer + "', element='button')"));
    } else {
      optimal.push_back(make_call("goto(url='" + site + "/" + rng.token(12) + "')"));
      for (int k = 1; k < optimal_len - 1; ++k) {
        std::string tok = "opt" + std::to_string(k) + "-" + rng.token(14);
        switch (rng.uniform(3)) {
          case 0:
            optimal.push_back(make_call("click(text='" + tok + "', element='button')"));
            break;
          case 1:
            optimal.push_back(
                make_call("type(text='" + tok + "', element='field-" + rng.token(6) + "')"));
            break;
          default:
            optimal.push_back(make_call("select(value='" + tok + "')"));
        }
      }
      optimal.push_back(make_call("click(text='" + answer + "', element='button')"));
    }

    std::vector<std::string> optimal_calls;
    for (const auto& a : optimal) optimal_calls.push_back(canonical_string(a));
    truth.optimal_paths[task_id] = optimal_calls;

    auto redundant_action = [&]() {
      switch (rng.uniform(4)) {
        case 0: return make_call("scroll(direction='down')");
        case 1: return make_call("hover(text='nav-" + rng.token(10) + "')");
        case 2: return make_call("wait(seconds='1')");
        default: return make_call("refresh()");
      }
    };

    for (int ai = 0; ai < cfg.n_agents; ++ai) {
      for (int run = 0; run < cfg.runs_per_agent; ++run) {
        Trajectory traj;
        traj.task_id = task_id;
        traj.agent_id = agent_ids[ai];
        traj.run_index = run;
        const bool success = rng.bernoulli(biases[ai]);
        std::vector<bool> labels;

        if (success) {
          for (int k = 0; k < optimal_len; ++k) {
            CanonicalAction a = optimal[k];
            bool is_answer = k == optimal_len - 1;
            if (!is_answer && rng.bernoulli(cfg.paraphrase_rate))
              a = paraphrase(a, rng);
            a.source_url = site + "/step" + std::to_string(k);
            traj.actions.push_back(a);
            labels.push_back(true);
            if (!anomaly) {
              while (rng.bernoulli(cfg.redundancy_rate)) {
                CanonicalAction r = redundant_action();
                r.necessary = false;
                r.source_url = site + "/step" + std::to_string(k);
                traj.actions.push_back(r);
                labels.push_back(false);
              }
            }
          }
        } else {
          int prefix = static_cast<int>(rng.uniform(optimal_len));  // 0..L-1
          for (int k = 0; k < prefix; ++k) {
            CanonicalAction a = optimal[k];
            a.source_url = site + "/step" + std::to_string(k);
            traj.actions.push_back(a);
            labels.push_back(true);
          }
          int divergent = 1 + static_cast<int>(rng.uniform(3));
          for (int k = 0; k < divergent; ++k) {
            std::string tok = "wrong-" + rng.token(12);
            CanonicalAction a =
                rng.bernoulli(0.5)
                    ? make_call("click(text='" + tok + "', element='link')")
                    : make_call("goto(url='" + site + "/dead-end/" + tok + "')");
            a.necessary = false;
            a.source_url = site + "/lost/" + std::to_string(k);
            traj.actions.push_back(a);
            labels.push_back(false);
          }
        }

        truth.outcomes[traj.key()] = success;
        truth.necessity[traj.key()] = labels;
        if (success && traj.actions.size() == 1) truth.anomaly_tasks.insert(task_id);
        data.trajectories.push_back(std::move(traj));
      }
    }
  }
  data.rebuild_agent_registry();
  return {std::move(data), std::move(truth)};
}

ordered_json ground_truth_json(const GroundTruth& t) {
  ordered_json j;
  ordered_json paths = ordered_json::object();
  for (const auto& [task, calls] : t.optimal_paths) paths[task] = calls;
  j["optimal_paths"] = std::move(paths);
  ordered_json outcomes = ordered_json::object();
  for (const auto& [key, success] : t.outcomes)
    outcomes[key] = success ? "success" : "failure";
  j["outcomes"] = std::move(outcomes);
  ordered_json necessity = ordered_json::object();
  for (const auto& [key, labels] : t.necessity) necessity[key] = labels;
  j["necessity"] = std::move(necessity);
  j["anomaly_tasks"] =
      std::vector<std::string>(t.anomaly_tasks.begin(), t.anomaly_tasks.end());
  return j;
}

GroundTruth ground_truth_from_json(const ordered_json& j) {
  GroundTruth t;
  for (const auto& [task, calls] : j.at("optimal_paths").items())
    t.optimal_paths[task] = calls.get<std::vector<std::string>>();
  for (const auto& [key, outcome] : j.at("outcomes").items())
    t.outcomes[key] = outcome.get<std::string>() == "success";
  for (const auto& [key, labels] : j.at("necessity").items())
    t.necessity[key] = labels.get<std::vector<bool>>();
  for (const auto& task : j.at("anomaly_tasks"))
    t.anomaly_tasks.insert(task.get<std::string>());
  return t;
}

bool VerifyReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const VerifyEntry& e) { return e.pass; });
}

std::string VerifyReport::to_string() const {
  std::string out;
  for (const auto& e : entries) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-34s expected %.6f actual %.6f (tol %.3g) %s\n",
                  e.name.c_str(), e.expected, e.actual, e.tolerance,
                  e.pass ? "PASS" : "FAIL");
    out += buf;
  }
  return out;
}

VerifyReport verify_against_truth(const Dataset& judged, const GroundTruth& truth,
                                  const SynthConfig& cfg) {
  if (judged.trajectories.size() != truth.outcomes.size())
    throw Error("TRUTH_MISMATCH", "dataset and ground truth disagree on run count");

  VerifyReport report;
  auto add = [&](const std::string& name, double expected, double actual,
                 double tol) {
    VerifyEntry e{name, expected, actual, tol, std::fabs(expected - actual) <= tol};
    report.entries.push_back(e);
  };

  // outcome agreement must be exact
  long outcome_mismatches = 0;
  for (const auto& t : judged.trajectories) {
    auto it = truth.outcomes.find(t.key());
    if (it == truth.outcomes.end())
      throw Error("TRUTH_MISMATCH", "trajectory " + t.key() + " not in ground truth");
    bool success = t.outcome == Outcome::Success;
    if (success != it->second) ++outcome_mismatches;
  }
  add("outcome_mismatches", 0, static_cast<double>(outcome_mismatches), 0);

  // per-agent success rates vs planted bias
  std::vector<double> biases = cfg.agent_success_bias;
  if (biases.empty()) biases.assign(cfg.n_agents, 0.5);
  auto frameworks = framework_stats(judged);
  for (size_t a = 0; a < frameworks.size() && a < biases.size(); ++a)
    add("success_rate[" + frameworks[a].agent_id + "]", biases[a],
        frameworks[a].success_rate, 0.05);

  // planted necessity is a label pass-through: exact
  long planted_necessary = 0, planted_total = 0;
  for (const auto& [key, labels] : truth.necessity)
    for (bool b : labels) {
      ++planted_total;
      if (b) ++planted_necessary;
    }
  NecessityBreakdown breakdown = necessity_breakdown(judged);
  add("necessity_rate",
      planted_total == 0 ? 0.0 : static_cast<double>(planted_necessary) / planted_total,
      breakdown.overall.rate(), 0);

  // anomaly task set: exact
  auto recovered = one_step_anomalies(judged);
  std::set<std::string> recovered_set(recovered.begin(), recovered.end());
  add("anomaly_set_difference", 0,
      static_cast<double>(recovered_set == truth.anomaly_tasks
                              ? 0
                              : recovered_set.size() + truth.anomaly_tasks.size()),
      0);

  // agreement fractions vs truth-computed fractions
  {
    Dataset planted = judged;
    for (auto& t : planted.trajectories) {
      t.outcome = truth.outcomes.at(t.key()) ? Outcome::Success : Outcome::Failure;
      t.judge_confidence = 1.0;
    }
    AgreementFractions expected = cross_agent_agreement(planted);
    AgreementFractions actual = cross_agent_agreement(judged);
    add("agreement_all_succeed", expected.all_succeed, actual.all_succeed, 0.05);
    add("agreement_all_fail", expected.all_fail, actual.all_fail, 0.05);
    add("agreement_mixed", expected.mixed, actual.mixed, 0.05);
  }

  // mean inflation of successful runs against the geometric-filler
  // expectation: E[len] = L / (1 - redundancy) for non-anomalous tasks
  {
    double expected_sum = 0.0, actual_sum = 0.0;
    long successes = 0;
    for (const auto& t : judged.trajectories) {
      if (t.outcome != Outcome::Success) continue;
      ++successes;
      size_t optimal_len = truth.optimal_paths.at(t.task_id).size();
      bool anomaly = truth.anomaly_tasks.count(t.task_id) > 0;
      expected_sum += anomaly ? 1.0 : 1.0 / (1.0 - cfg.redundancy_rate);
      actual_sum += static_cast<double>(t.actions.size()) / optimal_len;
    }
    if (successes > 0) {
      double expected = expected_sum / successes;
      double actual = actual_sum / successes;
      add("mean_inflation_vs_optimal", expected, actual, 0.10 * expected);
    }
  }

  return report;
}

}  // namespace wge
