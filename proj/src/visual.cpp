#include "avsearch/visual.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace avsearch {

void VisualConfig::validate() const {
  if (!(fov_deg > 0.0 && fov_deg <= 360.0))
    throw std::invalid_argument("VisualConfig: fov must be in (0, 360]");
  if (!(evidence_blend > 0.0 && evidence_blend <= 1.0))
    throw std::invalid_argument("VisualConfig: evidence_blend must be in (0, 1]");
  if (!(exclusion_decay >= 0.0 && exclusion_decay < 1.0))
    throw std::invalid_argument("VisualConfig: exclusion_decay must be in [0, 1)");
  if (!(visible_weight > 0.0) || !(evidence_floor > 0.0))
    throw std::invalid_argument("VisualConfig: weights must be positive");
  if (!(mismatch_similarity > 0.0 && mismatch_similarity <= 1.0))
    throw std::invalid_argument("VisualConfig: similarity must be in (0, 1]");
}

BeliefMap evidence_map(const SceneMap& map, const Pose& pose, Color target_color,
                       const PolarGrid& grid, const VisualConfig& cfg) {
  const int nr = grid.num_range_bins();
  const int na = grid.num_azimuth_bins();
  GridArray values = GridArray::Constant(nr, na, cfg.evidence_floor);

  const auto visible = visible_set(map, pose, cfg.fov_deg, cfg.merge_bearing_deg);
  if (!visible.empty()) {
    const Scalar share = 1.0 / static_cast<Scalar>(visible.size());
    for (const auto& v : visible) {
      const Scalar w = cfg.visible_weight * cfg.similarity(map.objects[v.object_index].color,
                                                           target_color);
      values(grid.range_bin(v.ego.r), grid.azimuth_bin(v.ego.theta_deg)) += w * share;
    }
  }

  // Negative evidence along every field-of-view ray.
  const Scalar keep = 1.0 - cfg.exclusion_decay;
  for (int k = 0; k < na; ++k) {
    const Scalar bearing = grid.azimuth_center(k);
    if (std::abs(bearing) > cfg.fov_deg / 2.0) continue;
    const RayHit hit = ray_march(map, pose, bearing, grid);
    int discounted_until;  // exclusive upper range bin
    if (!hit.hit()) {
      discounted_until = nr;
    } else if (map.objects[hit.object_index].color != target_color) {
      // A seen wrong-color surface demotes everything up to and including it.
      const Scalar r_obj = (map.objects[hit.object_index].position - pose.position()).norm();
      discounted_until = grid.range_bin(r_obj) + 1;
    } else {
      discounted_until = static_cast<int>(hit.clear_range_bins.size());
    }
    for (int i = 0; i < discounted_until; ++i) values(i, k) *= keep;
  }

  BeliefMap out(grid);
  out.log_values = (values / values.sum()).log();
  return out;
}

BeliefMap rotate_shift(const BeliefMap& prev, Scalar delta_psi_deg) {
  const Scalar bins = delta_psi_deg / prev.grid.azimuth_resolution();
  const Scalar rounded = std::round(bins);
  if (std::abs(bins - rounded) > 1e-9)
    throw std::invalid_argument("rotate_shift: heading change is not a whole number of bins");
  return rotate_azimuth(prev, static_cast<int>(rounded));
}

BeliefMap accumulate(const BeliefMap& prev, Scalar delta_psi_deg, const BeliefMap& evidence,
                     const VisualConfig& cfg) {
  if (prev.grid != evidence.grid) throw std::invalid_argument("accumulate: grid mismatch");
  const BeliefMap shifted = rotate_shift(prev, delta_psi_deg);
  const Scalar lambda = cfg.evidence_blend;
  const GridArray blended =
      (1.0 - lambda) * shifted.probabilities() + lambda * evidence.probabilities();
  BeliefMap out(prev.grid);
  out.log_values = (blended / blended.sum()).max(1e-300).log();
  return out;
}

std::string matrix_dump(const BeliefMap& map) {
  std::ostringstream ss;
  char buf[64];
  const GridArray probs = map.probabilities();
  for (int i = 0; i < map.grid.num_range_bins(); ++i) {
    for (int j = 0; j < map.grid.num_azimuth_bins(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", probs(i, j));
      ss << buf << (j + 1 == map.grid.num_azimuth_bins() ? "" : " ");
    }
    ss << "\n";
  }
  return ss.str();
}

GridArray matrix_parse(const std::string& text) {
  std::vector<std::vector<Scalar>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<Scalar> row;
    Scalar v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("matrix_parse: empty dump");
  GridArray out(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument("matrix_parse: ragged rows");
    for (size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  }
  return out;
}

std::string to_pgm(const BeliefMap& map) {
  const GridArray probs = map.probabilities();
  const Scalar peak = probs.maxCoeff();
  std::ostringstream ss;
  ss << "P2\n" << map.grid.num_azimuth_bins() << " " << map.grid.num_range_bins() << "\n255\n";
  for (int i = 0; i < map.grid.num_range_bins(); ++i) {
    for (int j = 0; j < map.grid.num_azimuth_bins(); ++j) {
      const int level = peak > 0.0 ? static_cast<int>(std::lround(255.0 * probs(i, j) / peak)) : 0;
      ss << level << (j + 1 == map.grid.num_azimuth_bins() ? "" : " ");
    }
    ss << "\n";
  }
  return ss.str();
}

}  // namespace avsearch
