#include "avsearch/environment.hpp"

#include <cmath>
#include <stdexcept>

#include "avsearch/auditory.hpp"
#include "avsearch/visual.hpp"

namespace avsearch {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::committed_correct: return "committed_correct";
    case Outcome::committed_wrong: return "committed_wrong";
    case Outcome::collision: return "collision";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "committed_correct") return Outcome::committed_correct;
  if (s == "committed_wrong") return Outcome::committed_wrong;
  if (s == "collision") return Outcome::collision;
  if (s == "timeout") return Outcome::timeout;
  throw std::invalid_argument("unknown outcome: " + s);
}

bool judge_commit(const SceneMap& map, const Pose& pose, const EgoPolar& estimate,
                  Scalar tolerance_m, bool* tie_flag) {
  if (tie_flag) *tie_flag = false;
  const Vec2 point = ego_to_world(pose, estimate);
  int nearest = -1;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (size_t i = 0; i < map.objects.size(); ++i) {
    const Scalar d = (map.objects[i].position - point).norm();
    if (d < best - 1e-12) {
      best = d;
      nearest = static_cast<int>(i);
    } else if (std::abs(d - best) <= 1e-12) {
      // Equidistant: lower id wins.
      if (tie_flag) *tie_flag = true;
      if (map.objects[i].id < map.objects[nearest].id) nearest = static_cast<int>(i);
    }
  }
  if (nearest < 0) return false;
  const Scalar dist_to_target = (map.target().position - point).norm();
  return map.objects[nearest].is_target && dist_to_target <= tolerance_m;
}

Environment::Environment(SceneMap map, SimulationConfig cfg)
    : map_(std::move(map)),
      cfg_(std::move(cfg)),
      grid_(cfg_.env.make_grid()),
      itd_table_(itd_table(grid_, cfg_.auditory)),
      forward_table_(ForwardRemapTable::build(grid_, cfg_.env.stride_m)),
      belief_(grid_),
      visual_accum_(grid_) {
  cfg_.validate();
  validate_map(map_);
}

CognitiveState Environment::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  pose_ = map_.start_pose;
  belief_ = init_uniform(grid_);
  visual_accum_ = init_uniform(grid_);
  elapsed_ = 0;
  done_ = false;

  log_ = EpisodeLog{};
  log_.map_id = map_.id;
  log_.env_seed = seed;
  log_.start_pose = pose_;
  log_.turn_angle_deg = cfg_.env.turn_angle_deg;
  log_.wrong_commit_penalty = cfg_.reward.wrong_commit_penalty;

  // First observation: the state handed to the policy already carries one
  // round of evidence.
  perceive_and_update(0.0);
  state_.last_actions = ActionHistory{};
  state_.elapsed_steps = 0;
  refresh_state();
  return state_;
}

void Environment::perceive_and_update(Scalar delta_psi_deg) {
  const EgoPolar target_ego = world_to_ego(pose_, map_.target().position);
  const ItdObservation obs = sample_itd(target_ego.theta_deg, cfg_.auditory, rng_,
                                        cfg_.env.observation_noise_scale);
  const BeliefMap audio = audio_likelihood(obs, grid_, cfg_.auditory, itd_table_);
  const BeliefMap evidence =
      evidence_map(map_, pose_, map_.target().color, grid_, cfg_.visual);
  visual_accum_ = accumulate(visual_accum_, delta_psi_deg, evidence, cfg_.visual);
  const BeliefMap joint = fuse(audio, visual_accum_, cfg_.belief);
  belief_ = leaky_update(belief_, joint, cfg_.belief);
}

void Environment::refresh_state() {
  state_.posterior = belief_;
  state_.summary = summarize(belief_);
  state_.elapsed_steps = elapsed_;
}

void Environment::finalize(Outcome outcome) {
  done_ = true;
  log_.outcome = outcome;
  log_.num_steps = static_cast<int>(log_.steps.size());
  Scalar ret = 0.0;
  int turns = 0;
  for (const auto& s : log_.steps) {
    ret += s.reward;
    if (s.action == Action::turn_left || s.action == Action::turn_right) ++turns;
  }
  log_.return_sum = ret;
  log_.head_turn_deg = cfg_.env.turn_angle_deg * turns;
  log_.displacement_m = (pose_.position() - log_.start_pose.position()).norm();
}

Environment::StepResult Environment::step(Action action) {
  if (done_) throw std::logic_error("Environment::step: episode already terminated");

  Scalar reward = -cfg_.reward.timestep_penalty;
  std::optional<Outcome> outcome;
  const Pose before = pose_;

  switch (action) {
    case Action::turn_left:
      pose_.heading_deg = wrap_angle(pose_.heading_deg - cfg_.env.turn_angle_deg);
      reward -= cfg_.reward.turn_penalty;
      break;
    case Action::turn_right:
      pose_.heading_deg = wrap_angle(pose_.heading_deg + cfg_.env.turn_angle_deg);
      reward -= cfg_.reward.turn_penalty;
      break;
    case Action::move_forward: {
      const Vec2 from = pose_.position();
      const Vec2 to = from + cfg_.env.stride_m * pose_.forward();
      pose_.x = to.x();
      pose_.y = to.y();
      reward -= cfg_.reward.forward_penalty;
      if (!map_.in_bounds(to) || segment_hits_object(map_, from, to)) {
        reward -= cfg_.reward.collision_penalty;
        outcome = Outcome::collision;
      }
      break;
    }
    case Action::stay:
      break;
    case Action::commit: {
      const EgoPolar estimate = state_.summary.map_estimate;
      bool tie = false;
      const bool correct =
          judge_commit(map_, pose_, estimate, cfg_.env.commit_tolerance_m, &tie);
      reward += correct ? cfg_.reward.task_reward : -cfg_.reward.wrong_commit_penalty;
      outcome = correct ? Outcome::committed_correct : Outcome::committed_wrong;
      log_.commit_estimate = estimate;
      log_.commit_point = ego_to_world(pose_, estimate);
      log_.commit_tie_break = tie;
      break;
    }
  }

  if (!outcome) {
    // Transport the belief through the embodied change, then observe.
    const Scalar delta_psi = wrap_angle(pose_.heading_deg - before.heading_deg);
    belief_ = transport(belief_, action, cfg_.env.stride_m, cfg_.env.turn_angle_deg);
    if (action == Action::move_forward)
      visual_accum_ = forward_transport(visual_accum_, forward_table_);
    perceive_and_update(delta_psi);
  }

  elapsed_ += 1;
  if (!outcome && elapsed_ >= cfg_.reward.max_steps) outcome = Outcome::timeout;

  refresh_state();
  for (size_t i = 0; i + 1 < state_.last_actions.size(); ++i)
    state_.last_actions[i] = state_.last_actions[i + 1];
  state_.last_actions.back() = action;

  StepRecord rec;
  rec.t = elapsed_;
  rec.action = action;
  rec.pose = pose_;
  rec.reward = reward;
  rec.summary = state_.summary;
  if (record_snapshots_) rec.belief_snapshot = belief_.probabilities();
  log_.steps.push_back(std::move(rec));

  if (outcome) finalize(*outcome);
  return StepResult{state_, reward, done_, outcome};
}

EpisodeLog resimulate(const SceneMap& map, const SimulationConfig& cfg,
                      const EpisodeLog& log) {
  Environment env(map, cfg);
  env.set_policy_name(log.policy_name);
  env.reset(log.env_seed);
  for (const auto& s : log.steps) env.step(s.action);
  if (!env.done()) throw std::runtime_error("resimulate: logged episode did not terminate");
  return env.log();
}

}  // namespace avsearch
