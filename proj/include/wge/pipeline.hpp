#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wge/annotation.hpp"
#include "wge/config.hpp"
#include "wge/consensus.hpp"
#include "wge/dataset.hpp"
#include "wge/synth.hpp"

namespace wge::pipeline {

namespace fs = std::filesystem;

// Writes the generated dataset under <out>/dataset and the planted truth
// to <out>/ground_truth.json.
void run_synth(const SynthConfig& cfg, const fs::path& out);

struct IngestReport {
  int trajectories = 0;
  int converted_actions = 0;  // went through the converter
  int passthrough_actions = 0;
  std::vector<Violation> violations;
};

// Raw dataset in, normalized dataset out. Every free-text description is
// converted through `converter`; canonical calls pass through unchanged.
IngestReport run_ingest(const fs::path& in_dir, const fs::path& out_dir,
                        AnnotatorClient& converter);

// Judges in place: loads <dataset_dir>, runs the judge, saves back.
JudgeReport run_judge(const fs::path& dataset_dir, AnnotatorClient& judge,
                      const JudgeOptions& opts);

struct BuildSummary {
  int task_count = 0;
  long node_total = 0;
  long edge_total = 0;
};

// One graph JSON per task under <graph_dir>, optionally a .dot next to it.
// Tasks are processed with `jobs` worker threads; output is deterministic
// because each task writes its own file.
BuildSummary run_build(const fs::path& dataset_dir, const fs::path& graph_dir,
                       double theta, bool dot, int jobs);

// Fills value / importance / edge classes into every graph file in place
// (and refreshes any .dot siblings, which color by class).
void run_analyze(const fs::path& graph_dir, const RewardConfig& reward,
                 const ClassifierConfig& classifier, int jobs);

// Emits framework_stats.csv, task_stats.csv, necessity_breakdown.csv,
// learning_curve.csv, classification_summary.csv and report.md.
void run_report(const fs::path& dataset_dir, const fs::path& graph_dir,
                const fs::path& report_dir);

std::map<std::string, ConsensusGraph> load_graphs(const fs::path& graph_dir);

// Order-independent digest of a directory tree (relative paths + bytes),
// used to check that repeated runs are byte-identical.
std::string hash_tree(const fs::path& root);

}  // namespace wge::pipeline
