#include "avsearch/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace avsearch {

void RewardConfig::validate() const {
  if (timestep_penalty < 0.0 || forward_penalty < 0.0 || turn_penalty < 0.0 ||
      collision_penalty < 0.0 || wrong_commit_penalty < 0.0)
    throw std::invalid_argument("RewardConfig: penalties must be non-negative");
  if (!(discount > 0.0 && discount <= 1.0))
    throw std::invalid_argument("RewardConfig: discount must be in (0, 1]");
  if (max_steps < 1) throw std::invalid_argument("RewardConfig: max_steps must be positive");
}

void EnvConfig::validate() const {
  if (!(turn_angle_deg > 0.0) || !(stride_m > 0.0) || !(commit_tolerance_m > 0.0))
    throw std::invalid_argument("EnvConfig: turn angle, stride and tolerance must be positive");
  if (observation_noise_scale < 0.0)
    throw std::invalid_argument("EnvConfig: noise scale must be non-negative");
  make_grid();  // validates bin counts
}

PolarGrid EnvConfig::make_grid() const {
  return PolarGrid(num_range_bins, num_azimuth_bins, 1.0, 360.0 / num_azimuth_bins);
}

void PlannerConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("PlannerConfig: horizon must be >= 1");
  if (hypothesis_samples < 1)
    throw std::invalid_argument("PlannerConfig: hypothesis_samples must be >= 1");
}

void SimulationConfig::validate() const {
  auditory.validate();
  visual.validate();
  belief.validate();
  reward.validate();
  env.validate();
  planner.validate();
  if (!(seconds_per_step > 0.0))
    throw std::invalid_argument("SimulationConfig: seconds_per_step must be positive");
}

namespace {

template <typename T>
void read_if_present(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string config_to_json(const SimulationConfig& cfg) {
  nlohmann::ordered_json j;
  j["auditory"] = {{"head_radius_m", cfg.auditory.head_radius_m},
                   {"speed_of_sound_mps", cfg.auditory.speed_of_sound_mps},
                   {"itd_noise_s", cfg.auditory.itd_noise_s}};
  j["visual"] = {{"fov_deg", cfg.visual.fov_deg},
                 {"merge_bearing_deg", cfg.visual.merge_bearing_deg},
                 {"evidence_blend", cfg.visual.evidence_blend},
                 {"exclusion_decay", cfg.visual.exclusion_decay},
                 {"visible_weight", cfg.visual.visible_weight},
                 {"mismatch_similarity", cfg.visual.mismatch_similarity},
                 {"evidence_floor", cfg.visual.evidence_floor}};
  j["belief"] = {{"evidence_blend", cfg.belief.evidence_blend},
                 {"visual_share", cfg.belief.visual_share}};
  j["reward"] = {{"task_reward", cfg.reward.task_reward},
                 {"timestep_penalty", cfg.reward.timestep_penalty},
                 {"forward_penalty", cfg.reward.forward_penalty},
                 {"turn_penalty", cfg.reward.turn_penalty},
                 {"collision_penalty", cfg.reward.collision_penalty},
                 {"wrong_commit_penalty", cfg.reward.wrong_commit_penalty},
                 {"discount", cfg.reward.discount},
                 {"max_steps", cfg.reward.max_steps}};
  j["env"] = {{"turn_angle_deg", cfg.env.turn_angle_deg},
              {"stride_m", cfg.env.stride_m},
              {"commit_tolerance_m", cfg.env.commit_tolerance_m},
              {"observation_noise_scale", cfg.env.observation_noise_scale},
              {"num_range_bins", cfg.env.num_range_bins},
              {"num_azimuth_bins", cfg.env.num_azimuth_bins}};
  j["planner"] = {{"horizon", cfg.planner.horizon},
                  {"hypothesis_samples", cfg.planner.hypothesis_samples}};
  j["seconds_per_step"] = cfg.seconds_per_step;
  return j.dump(2) + "\n";
}

SimulationConfig config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SimulationConfig cfg;
  if (j.contains("auditory")) {
    const auto& a = j.at("auditory");
    read_if_present(a, "head_radius_m", cfg.auditory.head_radius_m);
    read_if_present(a, "speed_of_sound_mps", cfg.auditory.speed_of_sound_mps);
    read_if_present(a, "itd_noise_s", cfg.auditory.itd_noise_s);
  }
  if (j.contains("visual")) {
    const auto& v = j.at("visual");
    read_if_present(v, "fov_deg", cfg.visual.fov_deg);
    read_if_present(v, "merge_bearing_deg", cfg.visual.merge_bearing_deg);
    read_if_present(v, "evidence_blend", cfg.visual.evidence_blend);
    read_if_present(v, "exclusion_decay", cfg.visual.exclusion_decay);
    read_if_present(v, "visible_weight", cfg.visual.visible_weight);
    read_if_present(v, "mismatch_similarity", cfg.visual.mismatch_similarity);
    read_if_present(v, "evidence_floor", cfg.visual.evidence_floor);
  }
  if (j.contains("belief")) {
    const auto& b = j.at("belief");
    read_if_present(b, "evidence_blend", cfg.belief.evidence_blend);
    read_if_present(b, "visual_share", cfg.belief.visual_share);
  }
  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    read_if_present(r, "task_reward", cfg.reward.task_reward);
    read_if_present(r, "timestep_penalty", cfg.reward.timestep_penalty);
    read_if_present(r, "forward_penalty", cfg.reward.forward_penalty);
    read_if_present(r, "turn_penalty", cfg.reward.turn_penalty);
    read_if_present(r, "collision_penalty", cfg.reward.collision_penalty);
    read_if_present(r, "wrong_commit_penalty", cfg.reward.wrong_commit_penalty);
    read_if_present(r, "discount", cfg.reward.discount);
    read_if_present(r, "max_steps", cfg.reward.max_steps);
  }
  if (j.contains("env")) {
    const auto& e = j.at("env");
    read_if_present(e, "turn_angle_deg", cfg.env.turn_angle_deg);
    read_if_present(e, "stride_m", cfg.env.stride_m);
    read_if_present(e, "commit_tolerance_m", cfg.env.commit_tolerance_m);
    read_if_present(e, "observation_noise_scale", cfg.env.observation_noise_scale);
    read_if_present(e, "num_range_bins", cfg.env.num_range_bins);
    read_if_present(e, "num_azimuth_bins", cfg.env.num_azimuth_bins);
  }
  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    read_if_present(p, "horizon", cfg.planner.horizon);
    read_if_present(p, "hypothesis_samples", cfg.planner.hypothesis_samples);
  }
  read_if_present(j, "seconds_per_step", cfg.seconds_per_step);
  cfg.validate();
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const SimulationConfig& cfg, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_config: cannot open " + path);
  f << config_to_json(cfg);
}

}  // namespace avsearch
