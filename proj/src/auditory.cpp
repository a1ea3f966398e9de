#include "avsearch/auditory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avsearch {

void AuditoryConfig::validate() const {
  if (!(head_radius_m > 0.0) || !(speed_of_sound_mps > 0.0) || !(itd_noise_s > 0.0))
    throw std::invalid_argument("AuditoryConfig: all parameters must be positive");
}

Scalar lateral_angle(Scalar theta_deg) {
  const Scalar w = wrap_angle(theta_deg);
  if (w > 90.0) return 180.0 - w;
  if (w < -90.0) return -180.0 - w;
  return w;
}

Scalar predict_itd(Scalar theta_deg, const AuditoryConfig& cfg) {
  const Scalar lat = deg_to_rad(lateral_angle(theta_deg));
  return cfg.head_radius_m * (lat + std::sin(lat)) / cfg.speed_of_sound_mps;
}

Scalar itd_sanity_bound(const AuditoryConfig& cfg) {
  return predict_itd(90.0, cfg) + 6.0 * cfg.itd_noise_s;
}

Eigen::ArrayXd itd_table(const PolarGrid& grid, const AuditoryConfig& cfg) {
  Eigen::ArrayXd table(grid.num_azimuth_bins());
  for (int k = 0; k < grid.num_azimuth_bins(); ++k)
    table[k] = predict_itd(grid.azimuth_center(k), cfg);
  return table;
}

ItdObservation sample_itd(Scalar true_bearing_deg, const AuditoryConfig& cfg, Rng& rng,
                          Scalar noise_scale) {
  const Scalar itd =
      predict_itd(true_bearing_deg, cfg) + rng.normal(0.0, cfg.itd_noise_s * noise_scale);
  const Scalar bound = itd_sanity_bound(cfg);
  return ItdObservation{std::clamp(itd, -bound, bound)};
}

BeliefMap audio_likelihood(const ItdObservation& obs, const PolarGrid& grid,
                           const AuditoryConfig& cfg) {
  return audio_likelihood(obs, grid, cfg, itd_table(grid, cfg));
}

BeliefMap audio_likelihood(const ItdObservation& obs, const PolarGrid& grid,
                           const AuditoryConfig& cfg, const Eigen::ArrayXd& table) {
  if (table.size() != grid.num_azimuth_bins())
    throw std::invalid_argument("audio_likelihood: table size does not match grid");
  if (!std::isfinite(obs.itd_s))
    throw std::invalid_argument("audio_likelihood: non-finite observation");
  const Scalar sigma = cfg.itd_noise_s;
  const Scalar log_norm = -std::log(sigma * std::sqrt(2.0 * kPi));
  BeliefMap map(grid);
  const Eigen::ArrayXd z = (obs.itd_s - table) / sigma;
  const Eigen::ArrayXd log_density = log_norm - 0.5 * z * z;
  for (int k = 0; k < grid.num_azimuth_bins(); ++k)
    map.log_values.col(k).setConstant(log_density[k]);
  return map;
}

}  // namespace avsearch
