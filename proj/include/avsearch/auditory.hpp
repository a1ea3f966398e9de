#pragma once

#include "avsearch/belief.hpp"
#include "avsearch/geometry.hpp"
#include "avsearch/rng.hpp"
#include "avsearch/types.hpp"

namespace avsearch {

struct AuditoryConfig {
  Scalar head_radius_m = 0.0875;
  Scalar speed_of_sound_mps = 343.0;
  Scalar itd_noise_s = 30e-6;

  void validate() const;
};

struct ItdObservation {
  Scalar itd_s = 0.0;  // signed, positive toward the right
};

// Mirrors an azimuth about the interaural axis into [-90, 90]. Directions on
// the same cone of confusion (theta and 180 - theta) share a lateral angle.
Scalar lateral_angle(Scalar theta_deg);

// Spherical-head arrival-time difference for a source at the given azimuth:
//   itd = r_head * (lat + sin(lat)) / c,  lat in radians.
// Evaluating on the lateral angle makes the prediction front-back symmetric,
// so the resulting likelihood carries the front-back ambiguity that only head
// movement can resolve. Antisymmetric in the azimuth sign.
Scalar predict_itd(Scalar theta_deg, const AuditoryConfig& cfg);

// Largest attainable |itd| plus a six-sigma allowance; observations are kept
// inside this bound.
Scalar itd_sanity_bound(const AuditoryConfig& cfg);

// Predicted itd at every azimuth bin center.
Eigen::ArrayXd itd_table(const PolarGrid& grid, const AuditoryConfig& cfg);

// True itd at the source bearing plus zero-mean Gaussian noise. noise_scale
// scales the sampled perturbation only; the likelihood model keeps its own
// sigma. Deterministic per rng state.
ItdObservation sample_itd(Scalar true_bearing_deg, const AuditoryConfig& cfg, Rng& rng,
                          Scalar noise_scale = 1.0);

// Per-cell Gaussian log-density of (itd - predicted itd), identical across all
// range bins. Unnormalized.
BeliefMap audio_likelihood(const ItdObservation& obs, const PolarGrid& grid,
                           const AuditoryConfig& cfg);
BeliefMap audio_likelihood(const ItdObservation& obs, const PolarGrid& grid,
                           const AuditoryConfig& cfg, const Eigen::ArrayXd& table);

}  // namespace avsearch
