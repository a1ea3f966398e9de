#pragma once

#include <memory>
#include <string>
#include <vector>

#include "avsearch/config.hpp"
#include "avsearch/environment.hpp"
#include "avsearch/rng.hpp"

namespace avsearch {

// Policies map the cognitive state to an action. They never see the scene;
// collisions and commit verdicts belong to the environment.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action decide(const CognitiveState& state, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

// Finite-horizon expected-utility planner over the belief.
//
// Committing is worth task_reward * (2 * p_hit - 1) where p_hit is the
// posterior mass within the commit tolerance around the MAP cell. Every other
// action is scored by sampling target hypotheses from the posterior, rolling
// the belief through the action and the observations those hypotheses would
// generate (the exact predicted itd, plus a visual frame in which a hypothesis
// inside the field of view is seen and everything nearer is found empty), and
// discounting the resulting commit value:
//
//   Q(a) = discount * E[V(b')] - action_cost(a) - timestep_penalty.
//
// Commit is chosen whenever it beats every continuation; there is no separate
// confidence threshold. Ties resolve in the order
// commit > stay > turn_left > turn_right > move_forward.
class GreedyPlanner : public Policy {
 public:
  GreedyPlanner(const SimulationConfig& cfg);

  Action decide(const CognitiveState& state, Rng& rng) override;
  std::string name() const override { return "greedy"; }

  // Expected terminal value of committing on this belief.
  Scalar commit_value(const BeliefMap& belief) const;
  // Posterior mass within the commit tolerance around the MAP estimate.
  Scalar hit_mass(const BeliefMap& belief) const;

 private:
  struct Hypothesis {
    int range_bin;
    int azimuth_bin;
  };

  Scalar continuation_value(const BeliefMap& belief, int depth, Rng& rng) const;
  Scalar action_value(const BeliefMap& belief, Action a,
                      const std::vector<Hypothesis>& hypotheses, int depth,
                      Rng& rng) const;
  BeliefMap simulate_update(const BeliefMap& transported, Action a,
                            const Hypothesis& h) const;
  std::vector<Hypothesis> draw_hypotheses(const BeliefMap& belief, Rng& rng) const;
  Scalar action_cost(Action a) const;

  SimulationConfig cfg_;
  PolarGrid grid_;
  Eigen::ArrayXd itd_table_;
  ForwardRemapTable forward_table_;
  GridArray sim_evidence_base_;   // log evidence with an empty field of view
  Eigen::ArrayXd cos_bin_delta_;  // cos of azimuth offsets, indexed by bin distance
  std::vector<bool> in_fov_;
};

// Rotate until the estimate is near dead ahead, walk in until it is near,
// then commit.
class HeuristicPolicy : public Policy {
 public:
  Action decide(const CognitiveState& state, Rng& rng) override;
  std::string name() const override { return "heuristic"; }
};

// Uniform over the four non-commit actions, committing with probability 0.05.
class RandomPolicy : public Policy {
 public:
  Action decide(const CognitiveState& state, Rng& rng) override;
  std::string name() const override { return "random"; }
};

std::unique_ptr<Policy> make_policy(const std::string& name, const SimulationConfig& cfg);

}  // namespace avsearch
