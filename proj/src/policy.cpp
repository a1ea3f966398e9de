#include "avsearch/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "avsearch/auditory.hpp"

namespace avsearch {

namespace {

constexpr Action kCandidateOrder[] = {Action::commit, Action::stay, Action::turn_left,
                                      Action::turn_right, Action::move_forward};

}  // namespace

GreedyPlanner::GreedyPlanner(const SimulationConfig& cfg)
    : cfg_(cfg),
      grid_(cfg.env.make_grid()),
      itd_table_(itd_table(grid_, cfg.auditory)),
      forward_table_(ForwardRemapTable::build(grid_, cfg.env.stride_m)) {
  cfg_.validate();
  const int nr = grid_.num_range_bins();
  const int na = grid_.num_azimuth_bins();
  const Scalar floor_log = std::log(cfg_.visual.evidence_floor);
  const Scalar seen_empty_log =
      std::log(cfg_.visual.evidence_floor * (1.0 - cfg_.visual.exclusion_decay));
  sim_evidence_base_ = GridArray::Constant(nr, na, floor_log);
  in_fov_.resize(na);
  for (int k = 0; k < na; ++k) {
    in_fov_[k] = std::abs(grid_.azimuth_center(k)) <= cfg_.visual.fov_deg / 2.0;
    if (in_fov_[k]) sim_evidence_base_.col(k).setConstant(seen_empty_log);
  }
  cos_bin_delta_.resize(na);
  for (int k = 0; k < na; ++k)
    cos_bin_delta_[k] = std::cos(deg_to_rad(k * grid_.azimuth_resolution()));
}

Scalar GreedyPlanner::hit_mass(const BeliefMap& belief) const {
  const BeliefSummary s = summarize(belief);
  const GridArray probs = belief.probabilities();
  const Scalar tol = cfg_.env.commit_tolerance_m;
  const Scalar rm = s.map_estimate.r;
  const int na = grid_.num_azimuth_bins();
  Scalar mass = 0.0;
  for (int i = 0; i < grid_.num_range_bins(); ++i) {
    const Scalar ri = grid_.range_center(i);
    if (std::abs(ri - rm) > tol) continue;
    for (int k = 0; k < na; ++k) {
      int dk = std::abs(k - s.map_azimuth_bin);
      dk = std::min(dk, na - dk);
      const Scalar d2 = ri * ri + rm * rm - 2.0 * ri * rm * cos_bin_delta_[dk];
      if (d2 <= tol * tol) mass += probs(i, k);
    }
  }
  return mass;
}

Scalar GreedyPlanner::commit_value(const BeliefMap& belief) const {
  const Scalar p = hit_mass(belief);
  return cfg_.reward.task_reward * p - cfg_.reward.task_reward * (1.0 - p);
}

Scalar GreedyPlanner::action_cost(Action a) const {
  switch (a) {
    case Action::turn_left:
    case Action::turn_right:
      return cfg_.reward.turn_penalty;
    case Action::move_forward:
      return cfg_.reward.forward_penalty;
    case Action::stay:
    case Action::commit:
      return 0.0;
  }
  return 0.0;
}

std::vector<GreedyPlanner::Hypothesis> GreedyPlanner::draw_hypotheses(
    const BeliefMap& belief, Rng& rng) const {
  const GridArray probs = belief.probabilities();
  const int nr = grid_.num_range_bins();
  const int cells = grid_.size();
  std::vector<Scalar> cdf(cells);
  Scalar acc = 0.0;
  const Scalar* data = probs.data();  // column-major: range index runs fastest
  for (int c = 0; c < cells; ++c) {
    acc += data[c];
    cdf[c] = acc;
  }
  const Scalar total = acc;
  std::vector<Hypothesis> hyps;
  hyps.reserve(cfg_.planner.hypothesis_samples);
  for (int s = 0; s < cfg_.planner.hypothesis_samples; ++s) {
    const Scalar u = rng.uniform() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int c = static_cast<int>(it - cdf.begin());
    if (c >= cells) c = cells - 1;
    hyps.push_back(Hypothesis{c % nr, c / nr});
  }
  return hyps;
}

BeliefMap GreedyPlanner::simulate_update(const BeliefMap& transported, Action a,
                                         const Hypothesis& h) const {
  // Hypothesis location in the post-action frame.
  Scalar r = grid_.range_center(h.range_bin);
  Scalar theta = grid_.azimuth_center(h.azimuth_bin);
  switch (a) {
    case Action::turn_left:
      theta = wrap_angle(theta + cfg_.env.turn_angle_deg);
      break;
    case Action::turn_right:
      theta = wrap_angle(theta - cfg_.env.turn_angle_deg);
      break;
    case Action::move_forward: {
      const Scalar th = deg_to_rad(theta);
      const Scalar x = r * std::sin(th);
      const Scalar y = r * std::cos(th) - cfg_.env.stride_m;
      r = std::sqrt(x * x + y * y);
      theta = rad_to_deg(std::atan2(x, y));
      break;
    }
    case Action::stay:
    case Action::commit:
      break;
  }

  // Predicted itd for the hypothesis bearing, turned into a log-likelihood
  // profile over azimuth (normalization constants drop out later).
  const Scalar itd = predict_itd(theta, cfg_.auditory);
  const Scalar sigma = cfg_.auditory.itd_noise_s;
  const Eigen::ArrayXd z = (itd - itd_table_) / sigma;
  const Eigen::ArrayXd audio_log = -0.5 * z * z;

  // Expected visual frame: the hypothesis is seen if it lies in view, cells in
  // front of it (and every other viewed cell) are found empty, cells behind it
  // stay unobserved.
  GridArray evidence_log = sim_evidence_base_;
  const bool visible = std::abs(theta) <= cfg_.visual.fov_deg / 2.0;
  if (visible) {
    const int ri = grid_.range_bin(r);
    const int ki = grid_.azimuth_bin(theta);
    const Scalar floor_log = std::log(cfg_.visual.evidence_floor);
    const int nr = grid_.num_range_bins();
    if (ri + 1 < nr)
      evidence_log.col(ki).segment(ri + 1, nr - ri - 1).setConstant(floor_log);
    evidence_log(ri, ki) =
        std::log(cfg_.visual.evidence_floor + cfg_.visual.visible_weight);
  }

  const Scalar w = cfg_.belief.visual_share;
  const Scalar alpha = cfg_.belief.evidence_blend;
  BeliefMap next(grid_);
  next.log_values = (1.0 - alpha) * transported.log_values + (alpha * w) * evidence_log;
  next.log_values.rowwise() += (alpha * (1.0 - w) * audio_log).transpose();
  next.normalize();
  return next;
}

Scalar GreedyPlanner::action_value(const BeliefMap& belief, Action a,
                                   const std::vector<Hypothesis>& hypotheses, int depth,
                                   Rng& rng) const {
  const BeliefMap transported =
      (a == Action::move_forward)
          ? forward_transport(belief, forward_table_)
          : transport(belief, a, cfg_.env.stride_m, cfg_.env.turn_angle_deg);
  Scalar sum = 0.0;
  for (const Hypothesis& h : hypotheses) {
    const BeliefMap next = simulate_update(transported, a, h);
    sum += (depth <= 2) ? commit_value(next) : continuation_value(next, depth - 1, rng);
  }
  const Scalar expected = sum / static_cast<Scalar>(hypotheses.size());
  return cfg_.reward.discount * expected - action_cost(a) - cfg_.reward.timestep_penalty;
}

Scalar GreedyPlanner::continuation_value(const BeliefMap& belief, int depth,
                                         Rng& rng) const {
  if (depth <= 1) return commit_value(belief);
  const auto hypotheses = draw_hypotheses(belief, rng);
  Scalar best = commit_value(belief);
  for (Action a : {Action::stay, Action::turn_left, Action::turn_right,
                   Action::move_forward}) {
    best = std::max(best, action_value(belief, a, hypotheses, depth, rng));
  }
  return best;
}

Action GreedyPlanner::decide(const CognitiveState& state, Rng& rng) {
  const BeliefMap& belief = state.posterior;
  const auto hypotheses = draw_hypotheses(belief, rng);

  Action best_action = Action::commit;
  Scalar best_value = commit_value(belief) - cfg_.reward.timestep_penalty;
  for (Action a : {Action::stay, Action::turn_left, Action::turn_right,
                   Action::move_forward}) {
    const Scalar q = action_value(belief, a, hypotheses, cfg_.planner.horizon, rng);
    if (q > best_value) {
      best_value = q;
      best_action = a;
    }
  }
  return best_action;
}

Action HeuristicPolicy::decide(const CognitiveState& state, Rng&) {
  const EgoPolar est = state.summary.map_estimate;
  if (std::abs(est.theta_deg) >= 15.0)
    return est.theta_deg > 0.0 ? Action::turn_right : Action::turn_left;
  if (est.r > 2.0) return Action::move_forward;
  return Action::commit;
}

Action RandomPolicy::decide(const CognitiveState&, Rng& rng) {
  if (rng.uniform() < 0.05) return Action::commit;
  switch (rng.uniform_int(4)) {
    case 0: return Action::turn_left;
    case 1: return Action::turn_right;
    case 2: return Action::move_forward;
    default: return Action::stay;
  }
}

std::unique_ptr<Policy> make_policy(const std::string& name, const SimulationConfig& cfg) {
  if (name == "greedy") return std::make_unique<GreedyPlanner>(cfg);
  if (name == "heuristic") return std::make_unique<HeuristicPolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>();
  throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace avsearch
