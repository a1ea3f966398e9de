#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avsearch/action.hpp"
#include "avsearch/belief.hpp"
#include "avsearch/config.hpp"
#include "avsearch/rng.hpp"
#include "avsearch/scene.hpp"

namespace avsearch {

enum class Outcome { committed_correct, committed_wrong, collision, timeout };

const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

// The policy-facing observation. Raw cues never appear here; decisions
// operate on the maintained posterior and its summaries.
struct CognitiveState {
  BeliefMap posterior;
  BeliefSummary summary;
  ActionHistory last_actions{};  // oldest first, empty slots at episode start
  int elapsed_steps = 0;
};

struct StepRecord {
  int t = 0;  // 1-based step index
  Action action = Action::stay;
  Pose pose;  // pose after the action
  Scalar reward = 0.0;
  BeliefSummary summary;  // posterior summary after the step's update
  std::optional<GridArray> belief_snapshot;
};

struct EpisodeLog {
  std::string map_id;
  std::uint64_t env_seed = 0;
  std::string policy_name;
  Pose start_pose;
  Scalar turn_angle_deg = 30.0;
  Scalar wrong_commit_penalty = 10.0;
  std::vector<StepRecord> steps;
  std::optional<Outcome> outcome;
  std::optional<EgoPolar> commit_estimate;
  std::optional<Vec2> commit_point;
  bool commit_tie_break = false;

  // Totals, filled when the episode terminates.
  Scalar return_sum = 0.0;
  Scalar head_turn_deg = 0.0;
  Scalar displacement_m = 0.0;
  int num_steps = 0;
};

// Correct iff the nearest object to the estimate (converted to a world point)
// is the target and the point lies within `tolerance_m` of the target center.
// Equidistant nearest-object ties resolve to the lowest id and set *tie_flag.
bool judge_commit(const SceneMap& map, const Pose& pose, const EgoPolar& estimate,
                  Scalar tolerance_m, bool* tie_flag = nullptr);

// Sequential decision environment over one scene. Each step applies the world
// transition, then transports the belief, then draws fresh observations and
// updates the posterior.
class Environment {
 public:
  Environment(SceneMap map, SimulationConfig cfg);

  CognitiveState reset(std::uint64_t seed);

  struct StepResult {
    CognitiveState state;
    Scalar reward = 0.0;
    bool done = false;
    std::optional<Outcome> outcome;
  };

  StepResult step(Action action);

  bool done() const { return done_; }
  const SceneMap& map() const { return map_; }
  const SimulationConfig& config() const { return cfg_; }
  const PolarGrid& grid() const { return grid_; }
  const Pose& pose() const { return pose_; }
  const EpisodeLog& log() const { return log_; }
  const CognitiveState& state() const { return state_; }

  void set_record_snapshots(bool on) { record_snapshots_ = on; }
  void set_policy_name(const std::string& name) { log_.policy_name = name; }

 private:
  void perceive_and_update(Scalar delta_psi_deg);
  void refresh_state();
  void finalize(Outcome outcome);

  SceneMap map_;
  SimulationConfig cfg_;
  PolarGrid grid_;
  Eigen::ArrayXd itd_table_;
  ForwardRemapTable forward_table_;

  Rng rng_{0};
  Pose pose_;
  BeliefMap belief_;
  BeliefMap visual_accum_;
  CognitiveState state_;
  EpisodeLog log_;
  int elapsed_ = 0;
  bool done_ = true;
  bool record_snapshots_ = false;
};

// Replays a logged action sequence under the logged seed; the result must
// reproduce the original episode exactly.
EpisodeLog resimulate(const SceneMap& map, const SimulationConfig& cfg,
                      const EpisodeLog& log);

}  // namespace avsearch
