#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avsearch/bridge.hpp"
#include "avsearch/config.hpp"
#include "avsearch/harness.hpp"
#include "avsearch/policy.hpp"

namespace fs = std::filesystem;
using namespace avsearch;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<SceneMap> load_map_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .json maps in " + dir);
  std::vector<SceneMap> maps;
  maps.reserve(files.size());
  for (const auto& f : files) maps.push_back(load_map(f.string()));
  return maps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embodied audiovisual search simulator"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON file overriding model constants")
      ->check(CLI::ExistingFile);

  // gen-maps
  auto* gen = app.add_subcommand("gen-maps", "Generate the evaluation map set");
  std::string gen_out;
  std::uint64_t gen_seed = 1;
  int gen_per_condition = 10;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Base seed");
  gen->add_option("--maps-per-condition", gen_per_condition, "Maps per condition");

  // run
  auto* run = app.add_subcommand("run", "Run a batch experiment over a map set");
  std::string run_maps, run_out, run_logs, run_policy = "greedy";
  std::uint64_t run_seed = 1;
  int run_repeats = 12, run_threads = 0;
  bool run_snapshots = false;
  run->add_option("--maps", run_maps, "Directory of map files")->required();
  run->add_option("--out", run_out, "Metrics CSV path")->required();
  run->add_option("--logs", run_logs, "Directory for per-episode logs");
  run->add_option("--policy", run_policy, "greedy | heuristic | random");
  run->add_option("--repeats", run_repeats, "Episodes per map");
  run->add_option("--seed", run_seed, "Base seed");
  run->add_option("--threads", run_threads, "Worker threads (0 = auto)");
  run->add_flag("--snapshots", run_snapshots, "Record per-step belief snapshots");

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "Summarize a metrics CSV");
  std::string agg_metrics, agg_out;
  double agg_human_accuracy = -1.0;
  agg->add_option("--metrics", agg_metrics, "Metrics CSV from `run`")->required();
  agg->add_option("--out", agg_out, "Output directory")->required();
  agg->add_option("--human-accuracy", agg_human_accuracy,
                  "Reference accuracy echoed beside the per-condition summary");

  // render
  auto* ren = app.add_subcommand("render", "Render one episode log");
  std::string ren_log, ren_map, ren_prefix;
  ren->add_option("--log", ren_log, "Episode .jsonl file")->required();
  ren->add_option("--map", ren_map, "Map file")->required();
  ren->add_option("--out-prefix", ren_prefix, "Writes <prefix>.txt and <prefix>.pgm")
      ->required();

  // bridge
  auto* br = app.add_subcommand("bridge", "Serve the environment over a wire protocol");
  int br_port = -1;
  br->add_option("--port", br_port, "TCP port (omit for stdio)");

  // selftest
  auto* st = app.add_subcommand("selftest", "Run the built-in invariant battery");
  std::uint64_t st_seed = 20260810;
  st->add_option("--seed", st_seed, "Seed for the fuzzed checks");

  CLI11_PARSE(app, argc, argv);

  try {
    SimulationConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg.validate();

    if (gen->parsed()) {
      fs::create_directories(gen_out);
      ExperimentSpec spec;
      spec.base_seed = gen_seed;
      spec.maps_per_condition = gen_per_condition;
      const auto maps = generate_map_set(spec);
      for (size_t i = 0; i < maps.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "map_%04zu_%s.json", i, maps[i].id.c_str());
        write_file(fs::path(gen_out) / name, map_to_json(maps[i]));
      }
      std::cout << "wrote " << maps.size() << " maps to " << gen_out << "\n";
      return 0;
    }

    if (run->parsed()) {
      const auto maps = load_map_dir(run_maps);
      ExperimentSpec spec;
      spec.policy = run_policy;
      spec.repeats = run_repeats;
      spec.base_seed = run_seed;
      spec.threads = run_threads;
      spec.record_snapshots = run_snapshots;
      const auto result = run_experiment(spec, maps, cfg);
      write_file(run_out, metrics_to_csv(result.rows));
      if (!run_logs.empty()) {
        fs::create_directories(run_logs);
        for (size_t i = 0; i < result.logs.size(); ++i) {
          char name[96];
          std::snprintf(name, sizeof(name), "episode_%05zu_%s_r%02d.jsonl", i,
                        result.logs[i].map_id.c_str(),
                        static_cast<int>(i % spec.repeats));
          write_file(fs::path(run_logs) / name, episode_to_jsonl(result.logs[i]));
        }
      }
      std::cout << "wrote " << result.rows.size() << " rows to " << run_out << "\n";
      return 0;
    }

    if (agg->parsed()) {
      const auto rows = metrics_from_csv(read_file(agg_metrics));
      fs::create_directories(agg_out);
      write_file(fs::path(agg_out) / "summary_by_condition.csv",
                 condition_summary_csv(aggregate_by_condition(rows), agg_human_accuracy));
      write_file(fs::path(agg_out) / "summary_by_map.csv",
                 map_summary_csv(aggregate_by_map(rows)));
      std::cout << "wrote summaries to " << agg_out << "\n";
      return 0;
    }

    if (ren->parsed()) {
      const EpisodeLog log = episode_from_jsonl(read_file(ren_log));
      const SceneMap map = load_map(ren_map);
      const TrajectoryRender r = render_trajectory(log, map);
      write_file(ren_prefix + ".txt", r.text);
      write_file(ren_prefix + ".pgm", r.pgm);
      std::cout << "wrote " << ren_prefix << ".txt and " << ren_prefix << ".pgm\n";
      return 0;
    }

    if (br->parsed()) {
      if (br_port >= 0)
        bridge_serve_tcp(br_port, cfg);
      else
        bridge_serve(std::cin, std::cout, cfg);
      return 0;
    }

    if (st->parsed()) return selftest(std::cout, st_seed) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
