// wge: consensus graphs over web-agent trajectories.
//
// Stages: synth -> ingest -> judge -> build -> analyze -> report.
// Every stage reads and writes plain files so runs can be resumed and
// diffed. Errors print a human message and end with a machine-readable
// code on the last line of stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wge/config.hpp"
#include "wge/error.hpp"
#include "wge/pipeline.hpp"

namespace {

std::unique_ptr<wge::AnnotatorClient> make_judge(const wge::RunConfig& cfg) {
  if (cfg.client_mode == "live") return wge::make_live_client(cfg.judge_client);
  return wge::make_mock_judge_client();
}

std::unique_ptr<wge::AnnotatorClient> make_converter(const wge::RunConfig& cfg) {
  if (cfg.client_mode == "live")
    return wge::make_live_client(cfg.converter_client);
  return wge::make_mock_converter_client();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consensus graphs over web-agent trajectories"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global flags after the subcommand name

  std::string config_path;
  app.add_option("--config", config_path, "run config (TOML)");

  wge::RunConfig cfg;
  wge::SynthConfig synth_cfg;

  std::string in_dir, out_dir, data_dir, graph_dir, graph_file;
  bool force = false;
  std::vector<double> biases;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--seed", synth_cfg.seed, "rng seed");
  synth->add_option("--tasks", synth_cfg.n_tasks, "number of tasks");
  synth->add_option("--agents", synth_cfg.n_agents, "number of agents");
  synth->add_option("--runs", synth_cfg.runs_per_agent, "runs per agent");
  synth->add_option("--redundancy", synth_cfg.redundancy_rate,
                    "redundant-step rate in successes");
  synth->add_option("--anomaly", synth_cfg.anomaly_rate,
                    "fraction of one-step anomaly tasks");
  synth->add_option("--paraphrase", synth_cfg.paraphrase_rate,
                    "near-duplicate paraphrase rate");
  synth->add_option("--bias", biases,
                    "per-agent success probability (repeatable)");

  auto* ingest = app.add_subcommand("ingest", "normalize raw trajectories");
  ingest->add_option("--in", in_dir, "raw dataset directory")->required();
  ingest->add_option("--out", out_dir, "normalized dataset directory")->required();
  ingest->add_option("--client", cfg.client_mode, "mock or live");

  auto* judge = app.add_subcommand("judge", "judge trajectory outcomes");
  judge->add_option("--data", data_dir, "dataset directory")->required();
  judge->add_flag("--force", force, "re-judge already judged runs");
  judge->add_option("--client", cfg.client_mode, "mock or live");

  auto* build = app.add_subcommand("build", "build per-task consensus graphs");
  build->add_option("--data", data_dir, "dataset directory")->required();
  build->add_option("--out", graph_dir, "graph output directory")->required();
  build->add_option("--theta", cfg.theta, "merge similarity threshold");
  build->add_flag("--dot", cfg.dot, "also write graphviz files");
  build->add_option("--jobs", cfg.jobs, "worker threads");

  auto* analyze = app.add_subcommand("analyze", "rewards and edge classes");
  analyze->add_option("--graphs", graph_dir, "graph directory")->required();
  analyze->add_option("--gamma", cfg.reward.gamma, "reward discount");
  analyze->add_option("--jobs", cfg.jobs, "worker threads");

  auto* report = app.add_subcommand("report", "emit csv and markdown reports");
  report->add_option("--data", data_dir, "dataset directory")->required();
  report->add_option("--graphs", graph_dir, "graph directory")->required();
  report->add_option("--out", out_dir, "report directory")->required();

  auto* export_cmd = app.add_subcommand("export", "graph json to graphviz dot");
  export_cmd->add_option("--graph", graph_file, "graph json file")->required();
  export_cmd->add_option("--out", out_dir, "dot file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      wge::RunConfig file_cfg = wge::load_run_config(config_path);
      // file values apply wherever the command line left the default
      if (!build->count("--theta")) cfg.theta = file_cfg.theta;
      if (!analyze->count("--gamma")) cfg.reward.gamma = file_cfg.reward.gamma;
      cfg.reward.tolerance = file_cfg.reward.tolerance;
      cfg.reward.max_iterations = file_cfg.reward.max_iterations;
      cfg.classifier = file_cfg.classifier;
      if (!ingest->count("--client") && !judge->count("--client"))
        cfg.client_mode = file_cfg.client_mode;
      cfg.judge_client = file_cfg.judge_client;
      cfg.converter_client = file_cfg.converter_client;
      if (!build->count("--jobs") && !analyze->count("--jobs"))
        cfg.jobs = file_cfg.jobs;
      if (!build->count("--dot")) cfg.dot = file_cfg.dot;
    }
    cfg.validate();

    if (synth->parsed()) {
      if (!biases.empty()) synth_cfg.agent_success_bias = biases;
      synth_cfg.validate();
      wge::pipeline::run_synth(synth_cfg, out_dir);
      std::cout << "wrote " << synth_cfg.n_tasks << " tasks, "
                << synth_cfg.n_tasks * synth_cfg.n_agents * synth_cfg.runs_per_agent
                << " trajectories to " << out_dir << "\n";
    } else if (ingest->parsed()) {
      auto converter = make_converter(cfg);
      auto rep = wge::pipeline::run_ingest(in_dir, out_dir, *converter);
      std::cout << rep.trajectories << " trajectories, "
                << rep.converted_actions << " actions converted, "
                << rep.passthrough_actions << " already canonical\n";
      if (!rep.violations.empty()) {
        for (const auto& v : rep.violations)
          std::cerr << v.location << ": " << v.message << "\n";
        std::cerr << rep.violations.front().code << "\n";
        return 1;
      }
    } else if (judge->parsed()) {
      auto client = make_judge(cfg);
      wge::JudgeOptions opts;
      opts.force = force;
      opts.backoff = (cfg.client_mode == "live");
      auto rep = wge::pipeline::run_judge(data_dir, *client, opts);
      std::cout << "judged " << rep.judged << ", skipped " << rep.skipped
                << ", failed " << rep.failures.size() << "\n";
      if (!rep.failures.empty()) {
        for (const auto& key : rep.failures) std::cerr << "unjudged: " << key << "\n";
        std::cerr << "PARTIAL\n";
        return 3;
      }
    } else if (build->parsed()) {
      auto sum = wge::pipeline::run_build(data_dir, graph_dir, cfg.theta,
                                          cfg.dot, cfg.jobs);
      std::cout << sum.task_count << " graphs, " << sum.node_total << " nodes, "
                << sum.edge_total << " edges\n";
    } else if (analyze->parsed()) {
      wge::pipeline::run_analyze(graph_dir, cfg.reward, cfg.classifier, cfg.jobs);
      std::cout << "analyzed graphs in " << graph_dir << "\n";
    } else if (report->parsed()) {
      wge::pipeline::run_report(data_dir, graph_dir, out_dir);
      std::cout << "wrote reports to " << out_dir << "\n";
    } else if (export_cmd->parsed()) {
      std::ifstream in(graph_file, std::ios::binary);
      if (!in) throw wge::Error("IO", "cannot read " + graph_file);
      std::ostringstream buf;
      buf << in.rdbuf();
      auto g = wge::import_graph_json(nlohmann::ordered_json::parse(buf.str()));
      std::string dot = wge::export_dot(g);
      if (out_dir.empty()) {
        std::cout << dot;
      } else {
        std::ofstream out(out_dir, std::ios::binary);
        if (!out) throw wge::Error("IO", "cannot write " + out_dir);
        out << dot;
      }
    }
  } catch (const wge::Error& e) {
    std::cerr << e.what() << "\n" << e.code() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << e.what() << "\nBAD_JSON\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\nINTERNAL\n";
    return 1;
  }
  return 0;
}
