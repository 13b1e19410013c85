#include "wge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "wge/analysis.hpp"
#include "wge/error.hpp"
#include "wge/metrics.hpp"

namespace wge::pipeline {

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IO", "cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs fn(i) for i in [0, n) on `jobs` threads. The first exception wins
// and is rethrown on the caller's thread.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int count = std::min<int>(jobs, static_cast<int>(n));
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<fs::path> sorted_json_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) throw Error("IO", "no such directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

void run_synth(const SynthConfig& cfg, const fs::path& out) {
  auto [dataset, truth] = generate(cfg);
  fs::create_directories(out);
  save_dataset(dataset, out / "dataset");
  write_file(out / "ground_truth.json", ground_truth_json(truth).dump(2) + "\n");
}

IngestReport run_ingest(const fs::path& in_dir, const fs::path& out_dir,
                        AnnotatorClient& converter) {
  RawDataset raw = load_raw_dataset(in_dir);
  IngestReport report;
  report.trajectories = static_cast<int>(raw.trajectories.size());
  for (const auto& traj : raw.trajectories) {
    for (const auto& act : traj.actions) {
      bool canonical = true;
      try {
        parse_action(act.description);
      } catch (const Error&) {
        canonical = false;
      }
      if (canonical)
        ++report.passthrough_actions;
      else
        ++report.converted_actions;
    }
  }
  Dataset dataset = canonicalize_dataset(raw, converter);
  report.violations = validate_dataset(dataset);
  save_dataset(dataset, out_dir);
  return report;
}

JudgeReport run_judge(const fs::path& dataset_dir, AnnotatorClient& judge,
                      const JudgeOptions& opts) {
  Dataset dataset = load_dataset(dataset_dir);
  JudgeReport report = judge_dataset(dataset, judge, opts);
  save_dataset(dataset, dataset_dir);
  return report;
}

BuildSummary run_build(const fs::path& dataset_dir, const fs::path& graph_dir,
                       double theta, bool dot, int jobs) {
  Dataset dataset = load_dataset(dataset_dir);
  std::map<std::string, std::vector<const Trajectory*>> by_task;
  for (const auto& traj : dataset.trajectories)
    by_task[traj.task_id].push_back(&traj);

  std::vector<const std::pair<const std::string, std::vector<const Trajectory*>>*>
      tasks;
  tasks.reserve(by_task.size());
  for (const auto& item : by_task) tasks.push_back(&item);

  fs::create_directories(graph_dir);
  std::atomic<long> node_total{0};
  std::atomic<long> edge_total{0};
  parallel_for(tasks.size(), jobs, [&](size_t i) {
    const auto& [task_id, trajs] = *tasks[i];
    ConsensusGraph g = build_consensus(trajs, theta);
    node_total += static_cast<long>(g.nodes.size());
    edge_total += static_cast<long>(g.edges.size());
    write_file(graph_dir / (task_id + ".json"),
               export_graph_json(g).dump(2) + "\n");
    if (dot) write_file(graph_dir / (task_id + ".dot"), export_dot(g));
  });

  BuildSummary summary;
  summary.task_count = static_cast<int>(tasks.size());
  summary.node_total = node_total.load();
  summary.edge_total = edge_total.load();
  return summary;
}

void run_analyze(const fs::path& graph_dir, const RewardConfig& reward,
                 const ClassifierConfig& classifier, int jobs) {
  classifier.validate();
  auto files = sorted_json_files(graph_dir);
  parallel_for(files.size(), jobs, [&](size_t i) {
    ConsensusGraph g =
        import_graph_json(nlohmann::ordered_json::parse(read_file(files[i])));
    propagate_rewards(g, reward);
    classify_edges(g, classifier);
    node_importance(g);
    write_file(files[i], export_graph_json(g).dump(2) + "\n");
    fs::path dot = files[i];
    dot.replace_extension(".dot");
    if (fs::exists(dot)) write_file(dot, export_dot(g));
  });
}

std::map<std::string, ConsensusGraph> load_graphs(const fs::path& graph_dir) {
  std::map<std::string, ConsensusGraph> graphs;
  for (const auto& file : sorted_json_files(graph_dir)) {
    ConsensusGraph g =
        import_graph_json(nlohmann::ordered_json::parse(read_file(file)));
    graphs.emplace(g.task_id, std::move(g));
  }
  return graphs;
}

void run_report(const fs::path& dataset_dir, const fs::path& graph_dir,
                const fs::path& report_dir) {
  Dataset dataset = load_dataset(dataset_dir);
  auto graphs = load_graphs(graph_dir);

  auto frameworks = framework_stats(dataset);
  auto task_rows = compute_task_stats(dataset, graphs);
  std::map<std::string, ComplexityBucket> buckets;
  for (const auto& row : task_rows) buckets[row.task_id] = row.complexity_bucket;
  auto necessity = necessity_breakdown(dataset, buckets.empty() ? nullptr : &buckets);
  auto agreement = cross_agent_agreement(dataset);
  auto curve = learning_curve(dataset);

  fs::create_directories(report_dir);
  write_file(report_dir / "framework_stats.csv", framework_stats_csv(frameworks));
  write_file(report_dir / "task_stats.csv", task_stats_csv(task_rows));
  write_file(report_dir / "necessity_breakdown.csv",
             necessity_breakdown_csv(necessity));
  write_file(report_dir / "learning_curve.csv", learning_curve_csv(curve));
  write_file(report_dir / "classification_summary.csv",
             classification_summary_csv(graphs));
  write_file(report_dir / "report.md",
             markdown_report(dataset, frameworks, task_rows, necessity,
                             agreement, curve));
}

std::string hash_tree(const fs::path& root) {
  if (!fs::exists(root)) throw Error("IO", "no such directory: " + root.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::vector<std::string> rels;
  rels.reserve(files.size());
  for (const auto& f : files) rels.push_back(fs::relative(f, root).generic_string());
  std::vector<size_t> order(files.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return rels[a] < rels[b]; });

  uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  auto mix = [&h](const std::string& bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (size_t i : order) {
    mix(rels[i]);
    mix("\x00");
    mix(read_file(files[i]));
    mix("\x01");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wge::pipeline
