#pragma once

#include <cmath>
#include <stdexcept>

#include "avsearch/types.hpp"

namespace avsearch {

// Normalizes an angle in degrees to [-180, 180). Idempotent.
inline Scalar wrap_angle(Scalar deg) {
  if (!std::isfinite(deg)) throw std::invalid_argument("wrap_angle: non-finite angle");
  Scalar w = std::fmod(deg + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}

// Agent pose in world coordinates. Heading convention: 0 deg looks along +y,
// positive headings rotate clockwise (toward +x). The same convention is used
// for bearings everywhere, so an object at positive ego azimuth is to the
// agent's right.
struct Pose {
  Scalar x = 0.0;
  Scalar y = 0.0;
  Scalar heading_deg = 0.0;

  Vec2 position() const { return Vec2{x, y}; }
  Vec2 forward() const {
    const Scalar h = deg_to_rad(heading_deg);
    return Vec2{std::sin(h), std::cos(h)};
  }
};

// Egocentric polar coordinates: range in meters (> 0) and azimuth in degrees
// relative to the heading, in [-180, 180).
struct EgoPolar {
  Scalar r = 0.0;
  Scalar theta_deg = 0.0;
};

// World bearing from one point toward another, same convention as headings.
inline Scalar world_bearing(const Vec2& from, const Vec2& to) {
  return rad_to_deg(std::atan2(to.x() - from.x(), to.y() - from.y()));
}

inline EgoPolar world_to_ego(const Pose& pose, const Vec2& point) {
  const Vec2 d = point - pose.position();
  const Scalar r = d.norm();
  if (r == 0.0) throw std::invalid_argument("world_to_ego: degenerate range zero");
  return EgoPolar{r, wrap_angle(world_bearing(pose.position(), point) - pose.heading_deg)};
}

inline Vec2 ego_to_world(const Pose& pose, const EgoPolar& ep) {
  if (!(ep.r > 0.0)) throw std::invalid_argument("ego_to_world: range must be positive");
  const Scalar b = deg_to_rad(pose.heading_deg + ep.theta_deg);
  return pose.position() + ep.r * Vec2{std::sin(b), std::cos(b)};
}

// Egocentric polar grid over range x azimuth.
//
// Range bins have centers at (i+1)*range_resolution, i in [0, num_range_bins),
// so the grid spans ranges (0, num_range_bins*range_resolution]. Azimuth bins
// have centers at -180 + k*azimuth_resolution with wrap-around; each bin owns
// the half-open interval (center - res/2, center + res/2]. With the defaults
// (30 x 360 at 1 m / 1 deg) centers sit on whole meters and whole degrees.
class PolarGrid {
 public:
  PolarGrid(int num_range_bins = 30, int num_azimuth_bins = 360,
            Scalar range_resolution = 1.0, Scalar azimuth_resolution = 1.0)
      : num_range_(num_range_bins),
        num_azimuth_(num_azimuth_bins),
        range_res_(range_resolution),
        azimuth_res_(azimuth_resolution) {
    if (num_range_ < 1 || num_azimuth_ < 1)
      throw std::invalid_argument("PolarGrid: bin counts must be positive");
    if (!(range_res_ > 0.0) || !(azimuth_res_ > 0.0))
      throw std::invalid_argument("PolarGrid: resolutions must be positive");
    if (std::abs(num_azimuth_ * azimuth_res_ - 360.0) > 1e-9)
      throw std::invalid_argument("PolarGrid: azimuth bins must tile the full circle");
  }

  int num_range_bins() const { return num_range_; }
  int num_azimuth_bins() const { return num_azimuth_; }
  Scalar range_resolution() const { return range_res_; }
  Scalar azimuth_resolution() const { return azimuth_res_; }
  Scalar max_range() const { return num_range_ * range_res_; }
  int size() const { return num_range_ * num_azimuth_; }

  Scalar range_center(int i) const { return (i + 1) * range_res_; }
  Scalar azimuth_center(int k) const { return -180.0 + k * azimuth_res_; }

  // Nearest-center bin, clamped into the grid (ranges in (0, max] land in
  // their own bin; anything past the ends is clamped to the edge bins).
  int range_bin(Scalar r) const {
    const auto idx = static_cast<long>(std::ceil(r / range_res_ - 0.5));
    if (idx < 1) return 0;
    if (idx > num_range_) return num_range_ - 1;
    return static_cast<int>(idx) - 1;
  }

  int azimuth_bin(Scalar theta_deg) const {
    const Scalar w = wrap_angle(theta_deg);
    auto idx = static_cast<long>(std::ceil((w + 180.0) / azimuth_res_ - 0.5));
    idx %= num_azimuth_;
    if (idx < 0) idx += num_azimuth_;
    return static_cast<int>(idx);
  }

  bool range_in_grid(Scalar r) const { return r > 0.0 && r <= max_range(); }

  EgoPolar bin_center(int range_bin, int azimuth_bin) const {
    return EgoPolar{range_center(range_bin), azimuth_center(azimuth_bin)};
  }

  bool operator==(const PolarGrid& o) const {
    return num_range_ == o.num_range_ && num_azimuth_ == o.num_azimuth_ &&
           range_res_ == o.range_res_ && azimuth_res_ == o.azimuth_res_;
  }
  bool operator!=(const PolarGrid& o) const { return !(*this == o); }

 private:
  int num_range_;
  int num_azimuth_;
  Scalar range_res_;
  Scalar azimuth_res_;
};

}  // namespace avsearch
