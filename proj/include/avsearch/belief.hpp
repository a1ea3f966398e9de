#pragma once

#include <vector>

#include "avsearch/action.hpp"
#include "avsearch/geometry.hpp"
#include "avsearch/types.hpp"

namespace avsearch {

// Probability map over the egocentric polar grid, kept in log space.
// Rows index range bins, columns index azimuth bins.
struct BeliefMap {
  PolarGrid grid;
  GridArray log_values;

  BeliefMap() : grid(), log_values(GridArray::Zero(grid.num_range_bins(), grid.num_azimuth_bins())) {}
  explicit BeliefMap(const PolarGrid& g)
      : grid(g), log_values(GridArray::Zero(g.num_range_bins(), g.num_azimuth_bins())) {}

  Scalar log_sum_exp() const;

  // Shifts log values so that the exponentiated map sums to one.
  void normalize();

  // Linear-space probabilities (caller decides whether the map is normalized).
  GridArray probabilities() const { return log_values.exp(); }

  Scalar total_mass() const { return log_values.exp().sum(); }
};

struct BeliefConfig {
  Scalar evidence_blend = 0.8;  // weight of new joint evidence in the leaky update
  Scalar visual_share = 0.7;    // visual weight in the log-linear fusion

  void validate() const;
};

struct BeliefSummary {
  EgoPolar map_estimate;          // center of the argmax cell
  int map_range_bin = 0;
  int map_azimuth_bin = 0;
  Scalar theta_uncertainty_deg = 0.0;  // circular std of the azimuth marginal
  Scalar r_uncertainty_m = 0.0;        // std of the range marginal
  Scalar entropy_nats = 0.0;
};

// Uniform map, normalized.
BeliefMap init_uniform(const PolarGrid& grid);

// Weighted log-linear fusion: visual_share*log(visual) + (1-visual_share)*log(audio).
// Returns an unnormalized joint log-likelihood map. Throws on grid mismatch.
BeliefMap fuse(const BeliefMap& audio, const BeliefMap& visual, const BeliefConfig& cfg);

// Leaky accumulation in log space, then normalization:
//   log b_t = (1-a)*log b_{t-1} + a*log L_joint.
BeliefMap leaky_update(const BeliefMap& prior, const BeliefMap& joint_log,
                       const BeliefConfig& cfg);

// Exact circular permutation along azimuth: out[k] = in[(k + shift) mod K].
BeliefMap rotate_azimuth(const BeliefMap& b, int shift_bins);

// Precomputed scatter table for re-projecting mass after a forward step of
// fixed length: every source cell sends its mass to the bilinear neighborhood
// of its coordinates in the advanced frame. Shares falling inside the new
// origin (range below the first bin) are dropped; shares past the far edge
// are clamped into the last range bin; azimuth wraps.
struct ForwardRemapTable {
  PolarGrid grid;
  Scalar distance = 0.0;
  // Per source cell (column-major over the grid array): low range bin (may be
  // -1 = dropped share), low azimuth bin, fractional offsets.
  std::vector<int> r_lo;
  std::vector<int> az_lo;
  std::vector<Scalar> r_frac;
  std::vector<Scalar> az_frac;

  static ForwardRemapTable build(const PolarGrid& grid, Scalar distance);
};

// Forward re-projection with renormalization. If pre_normalization_mass is
// given, receives the scattered mass before renormalization (always <= 1 for
// a normalized input; the deficit is the share dropped at the near edge).
BeliefMap forward_transport(const BeliefMap& b, const ForwardRemapTable& table,
                            Scalar* pre_normalization_mass = nullptr);
BeliefMap forward_transport(const BeliefMap& b, Scalar distance,
                            Scalar* pre_normalization_mass = nullptr);

// Action-conditioned belief transport. Turns rotate the map against the
// heading change, forward steps re-project, stay/commit are identity.
BeliefMap transport(const BeliefMap& b, Action action, Scalar step_m, Scalar turn_deg);

// MAP estimate (ties break to the lowest range bin, then lowest azimuth bin),
// circular azimuth moments, linear range moments, Shannon entropy in nats.
// Expects a normalized map.
BeliefSummary summarize(const BeliefMap& b);

}  // namespace avsearch
