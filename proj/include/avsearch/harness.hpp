#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "avsearch/config.hpp"
#include "avsearch/environment.hpp"
#include "avsearch/scene.hpp"

namespace avsearch {

struct ExperimentSpec {
  std::vector<AngleClass> angles{AngleClass::front, AngleClass::side, AngleClass::back};
  std::vector<int> object_counts{5, 7, 12};
  std::vector<int> distractor_counts{0, 2, 4};
  int maps_per_condition = 10;   // 3x3x3 x 10 = 270 maps by default
  int repeats = 12;
  std::string policy = "greedy";
  std::uint64_t base_seed = 1;
  int threads = 0;  // 0: hardware concurrency
  bool record_snapshots = false;
};

struct MetricRow {
  std::string map_id;
  Condition condition;
  int repeat = 0;
  Outcome outcome = Outcome::timeout;
  int steps = 0;
  Scalar search_time_s = 0.0;
  Scalar head_turn_deg = 0.0;
  Scalar displacement_m = 0.0;
  Scalar episode_return = 0.0;
};

struct ExperimentResult {
  std::vector<MetricRow> rows;   // ordered by (map, repeat)
  std::vector<EpisodeLog> logs;  // same order
};

// The deterministic map set for a spec (same seeds the gen-maps command uses).
std::vector<SceneMap> generate_map_set(const ExperimentSpec& spec);

// One episode per (map, repeat), dispatched to a worker pool and merged in
// (map, repeat) order. Deterministic for fixed seeds.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::vector<SceneMap>& maps,
                                const SimulationConfig& cfg);

MetricRow metric_row_from_log(const EpisodeLog& log, const Condition& condition,
                              int repeat, Scalar seconds_per_step);

// metrics.csv column order:
//   map_id,angle,num_objects,num_distractors,repeat,outcome,steps,
//   search_time_s,head_turn_deg,displacement_m,return
std::string metrics_to_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> metrics_from_csv(const std::string& text);

struct ConditionSummary {
  Condition condition;
  int n = 0;
  Scalar accuracy = 0.0;
  Scalar median_steps = 0.0;
  Scalar mean_steps = 0.0;
  Scalar median_search_time_s = 0.0;
  Scalar median_head_turn_deg = 0.0;
  Scalar median_displacement_m = 0.0;
  Scalar mean_return = 0.0;
};

struct MapSummary {
  std::string map_id;
  Condition condition;
  int n = 0;
  Scalar accuracy = 0.0;
  Scalar median_steps = 0.0;
  Scalar median_search_time_s = 0.0;
  Scalar median_head_turn_deg = 0.0;
  Scalar median_displacement_m = 0.0;
};

// Descriptive statistics only. human_accuracy, when non-negative, is echoed as
// a side-by-side reference column.
std::vector<ConditionSummary> aggregate_by_condition(const std::vector<MetricRow>& rows);
std::vector<MapSummary> aggregate_by_map(const std::vector<MetricRow>& rows);
std::string condition_summary_csv(const std::vector<ConditionSummary>& rows,
                                  Scalar human_accuracy = -1.0);
std::string map_summary_csv(const std::vector<MapSummary>& rows);

Scalar median(std::vector<Scalar> values);

// Episode log files: newline-delimited JSON, one header record, one record per
// step, one footer record with the outcome and totals.
std::string episode_to_jsonl(const EpisodeLog& log);
EpisodeLog episode_from_jsonl(const std::string& text);

struct TrajectoryRender {
  std::string text;  // character map with start/path/end/commit/target markers
  std::string pgm;   // grayscale image, 10 px per meter
};

TrajectoryRender render_trajectory(const EpisodeLog& log, const SceneMap& map);

// Built-in invariant battery; prints one line per check. Returns true when
// every check passes.
bool selftest(std::ostream& out, std::uint64_t seed = 20260810);

}  // namespace avsearch
