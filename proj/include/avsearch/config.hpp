#pragma once

#include <string>

#include "avsearch/auditory.hpp"
#include "avsearch/belief.hpp"
#include "avsearch/types.hpp"
#include "avsearch/visual.hpp"

namespace avsearch {

struct RewardConfig {
  Scalar task_reward = 10.0;
  Scalar timestep_penalty = 0.1;
  Scalar forward_penalty = 0.3;
  Scalar turn_penalty = 0.1;
  Scalar collision_penalty = 5.0;
  Scalar wrong_commit_penalty = 10.0;  // symmetric with task_reward by default
  Scalar discount = 0.99;
  int max_steps = 30;

  void validate() const;
};

struct EnvConfig {
  Scalar turn_angle_deg = 30.0;
  Scalar stride_m = 1.0;
  Scalar commit_tolerance_m = 1.5;
  // Scales the sampled observation noise only; the likelihood keeps its sigma.
  Scalar observation_noise_scale = 1.0;
  int num_range_bins = 30;
  int num_azimuth_bins = 360;

  void validate() const;
  PolarGrid make_grid() const;
};

struct PlannerConfig {
  int horizon = 2;
  int hypothesis_samples = 32;

  void validate() const;
};

// Every model constant in one place, loadable from a JSON config file.
struct SimulationConfig {
  AuditoryConfig auditory;
  VisualConfig visual;
  BeliefConfig belief;
  RewardConfig reward;
  EnvConfig env;
  PlannerConfig planner;
  Scalar seconds_per_step = 1.0;

  void validate() const;
};

std::string config_to_json(const SimulationConfig& cfg);
SimulationConfig config_from_json(const std::string& text);
SimulationConfig load_config(const std::string& path);
void save_config(const SimulationConfig& cfg, const std::string& path);

}  // namespace avsearch
