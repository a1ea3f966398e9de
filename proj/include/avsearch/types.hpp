#pragma once

#include <Eigen/Dense>

namespace avsearch {

using Scalar = double;
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

// Range-major grid storage: rows = range bins, cols = azimuth bins.
using GridArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Scalar kPi = 3.14159265358979323846;

inline Scalar deg_to_rad(Scalar deg) { return deg * kPi / 180.0; }
inline Scalar rad_to_deg(Scalar rad) { return rad * 180.0 / kPi; }

}  // namespace avsearch
