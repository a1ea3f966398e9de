#pragma once

#include <string>

#include "avsearch/belief.hpp"
#include "avsearch/scene.hpp"
#include "avsearch/types.hpp"

namespace avsearch {

struct VisualConfig {
  Scalar fov_deg = 110.0;
  Scalar merge_bearing_deg = 5.0;
  Scalar evidence_blend = 0.7;      // weight of the current frame in the moving average
  Scalar exclusion_decay = 0.5;     // discount for cells inspected and found empty
  Scalar visible_weight = 5.0;      // peak height for a visible object
  Scalar mismatch_similarity = 0.1; // feature similarity of a wrong-color object
  Scalar evidence_floor = 1e-6;     // per-cell floor before normalization

  void validate() const;
  Scalar similarity(Color object_color, Color target_color) const {
    return object_color == target_color ? 1.0 : mismatch_similarity;
  }
};

// Instantaneous visual evidence, normalized:
//   * a floor everywhere,
//   * one peak per visible object, height visible_weight * similarity,
//     contributions divided by the number of visible objects,
//   * line-of-sight discount (1 - exclusion_decay) on every field-of-view cell
//     whose center lies strictly before the first surface on its ray; when
//     that surface does not match the target color the discount extends
//     through the surface's own cell.
BeliefMap evidence_map(const SceneMap& map, const Pose& pose, Color target_color,
                       const PolarGrid& grid, const VisualConfig& cfg);

// Circular azimuth shift compensating a heading change of delta_psi. The
// shift must be a whole number of azimuth bins; total mass is preserved
// exactly (pure permutation).
BeliefMap rotate_shift(const BeliefMap& prev, Scalar delta_psi_deg);

// Exponential moving average of visual evidence in the head-centered frame:
//   out = normalize((1 - blend) * rotate_shift(prev, delta_psi) + blend * evidence)
// computed in linear space. Both inputs are expected normalized.
BeliefMap accumulate(const BeliefMap& prev, Scalar delta_psi_deg, const BeliefMap& evidence,
                     const VisualConfig& cfg);

// Plain-text matrix dump: one row per range bin (ascending), azimuth bins
// ascending left to right, round-trip formatted values. Bit-exact on reload.
std::string matrix_dump(const BeliefMap& map);
GridArray matrix_parse(const std::string& text);

// ASCII PGM (P2) heatmap, linearly scaled so the largest cell maps to white.
// Rows are range bins ascending top to bottom, columns azimuth bins.
std::string to_pgm(const BeliefMap& map);

}  // namespace avsearch
