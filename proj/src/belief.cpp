#include "avsearch/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avsearch {

Scalar BeliefMap::log_sum_exp() const {
  const Scalar m = log_values.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((log_values - m).exp().sum());
}

void BeliefMap::normalize() {
  const Scalar lse = log_sum_exp();
  if (!std::isfinite(lse)) throw std::runtime_error("BeliefMap::normalize: non-finite mass");
  log_values -= lse;
}

void BeliefConfig::validate() const {
  if (!(evidence_blend > 0.0 && evidence_blend <= 1.0))
    throw std::invalid_argument("BeliefConfig: evidence_blend must be in (0, 1]");
  if (!(visual_share >= 0.0 && visual_share <= 1.0))
    throw std::invalid_argument("BeliefConfig: visual_share must be in [0, 1]");
}

BeliefMap init_uniform(const PolarGrid& grid) {
  BeliefMap b(grid);
  b.log_values.setConstant(-std::log(static_cast<Scalar>(grid.size())));
  return b;
}

BeliefMap fuse(const BeliefMap& audio, const BeliefMap& visual, const BeliefConfig& cfg) {
  if (audio.grid != visual.grid)
    throw std::invalid_argument("fuse: audio and visual maps use different grids");
  BeliefMap joint(audio.grid);
  const Scalar w = cfg.visual_share;
  joint.log_values = w * visual.log_values + (1.0 - w) * audio.log_values;
  return joint;
}

BeliefMap leaky_update(const BeliefMap& prior, const BeliefMap& joint_log,
                       const BeliefConfig& cfg) {
  if (prior.grid != joint_log.grid)
    throw std::invalid_argument("leaky_update: grid mismatch");
  BeliefMap post(prior.grid);
  const Scalar a = cfg.evidence_blend;
  post.log_values = (1.0 - a) * prior.log_values + a * joint_log.log_values;
  post.normalize();
  return post;
}

BeliefMap rotate_azimuth(const BeliefMap& b, int shift_bins) {
  const int k = b.grid.num_azimuth_bins();
  int s = shift_bins % k;
  if (s < 0) s += k;
  BeliefMap out(b.grid);
  if (s == 0) {
    out.log_values = b.log_values;
    return out;
  }
  const int tail = k - s;
  out.log_values.leftCols(tail) = b.log_values.rightCols(tail);
  out.log_values.rightCols(s) = b.log_values.leftCols(s);
  return out;
}

ForwardRemapTable ForwardRemapTable::build(const PolarGrid& grid, Scalar distance) {
  ForwardRemapTable t{grid, distance, {}, {}, {}, {}};
  const int nr = grid.num_range_bins();
  const int na = grid.num_azimuth_bins();
  t.r_lo.resize(static_cast<size_t>(nr) * na);
  t.az_lo.resize(t.r_lo.size());
  t.r_frac.resize(t.r_lo.size());
  t.az_frac.resize(t.r_lo.size());
  for (int j = 0; j < na; ++j) {
    const Scalar th = deg_to_rad(grid.azimuth_center(j));
    const Scalar sin_th = std::sin(th);
    const Scalar cos_th = std::cos(th);
    for (int i = 0; i < nr; ++i) {
      const Scalar r = grid.range_center(i);
      // Ego coordinates with the new origin advanced by `distance` ahead.
      const Scalar x = r * sin_th;
      const Scalar y = r * cos_th - distance;
      const Scalar rn = std::sqrt(x * x + y * y);
      const Scalar thn = rad_to_deg(std::atan2(x, y));
      // Continuous bin coordinates: u = 0 at the first range center.
      const Scalar u = rn / grid.range_resolution() - 1.0;
      Scalar v = (wrap_angle(thn) + 180.0) / grid.azimuth_resolution();
      const Scalar u_fl = std::floor(u);
      Scalar v_fl = std::floor(v);
      Scalar fv = v - v_fl;
      long vj = static_cast<long>(v_fl) % na;
      if (vj < 0) vj += na;
      const size_t idx = static_cast<size_t>(j) * nr + i;
      t.r_lo[idx] = static_cast<int>(u_fl);
      t.r_frac[idx] = u - u_fl;
      t.az_lo[idx] = static_cast<int>(vj);
      t.az_frac[idx] = fv;
    }
  }
  return t;
}

BeliefMap forward_transport(const BeliefMap& b, const ForwardRemapTable& table,
                            Scalar* pre_normalization_mass) {
  if (b.grid != table.grid)
    throw std::invalid_argument("forward_transport: table built for a different grid");
  const int nr = b.grid.num_range_bins();
  const int na = b.grid.num_azimuth_bins();
  const GridArray probs = b.probabilities();
  GridArray out = GridArray::Zero(nr, na);

  auto deposit = [&](int ri, int aj, Scalar m) {
    if (m == 0.0) return;
    if (ri < 0) return;              // mass walked past: dropped at the near edge
    if (ri >= nr) ri = nr - 1;       // clamped into the far bin
    out(ri, aj) += m;
  };

  for (int j = 0; j < na; ++j) {
    for (int i = 0; i < nr; ++i) {
      const Scalar m = probs(i, j);
      if (m == 0.0) continue;
      const size_t idx = static_cast<size_t>(j) * nr + i;
      const int r0 = table.r_lo[idx];
      const int a0 = table.az_lo[idx];
      const int a1 = (a0 + 1) % na;
      const Scalar fr = table.r_frac[idx];
      const Scalar fa = table.az_frac[idx];
      deposit(r0, a0, m * (1.0 - fr) * (1.0 - fa));
      deposit(r0, a1, m * (1.0 - fr) * fa);
      deposit(r0 + 1, a0, m * fr * (1.0 - fa));
      deposit(r0 + 1, a1, m * fr * fa);
    }
  }

  const Scalar mass = out.sum();
  if (pre_normalization_mass) *pre_normalization_mass = mass;
  if (!(mass > 0.0)) throw std::runtime_error("forward_transport: all mass lost at grid edge");
  BeliefMap result(b.grid);
  result.log_values = (out / mass).max(1e-300).log();
  return result;
}

BeliefMap forward_transport(const BeliefMap& b, Scalar distance,
                            Scalar* pre_normalization_mass) {
  return forward_transport(b, ForwardRemapTable::build(b.grid, distance),
                           pre_normalization_mass);
}

BeliefMap transport(const BeliefMap& b, Action action, Scalar step_m, Scalar turn_deg) {
  switch (action) {
    case Action::turn_left:
    case Action::turn_right: {
      const Scalar dpsi = (action == Action::turn_right) ? turn_deg : -turn_deg;
      const Scalar bins = dpsi / b.grid.azimuth_resolution();
      const Scalar rounded = std::round(bins);
      if (std::abs(bins - rounded) > 1e-9)
        throw std::invalid_argument("transport: turn is not a whole number of azimuth bins");
      return rotate_azimuth(b, static_cast<int>(rounded));
    }
    case Action::move_forward:
      return forward_transport(b, step_m);
    case Action::stay:
    case Action::commit:
      return b;
  }
  return b;
}

BeliefSummary summarize(const BeliefMap& b) {
  const int nr = b.grid.num_range_bins();
  const int na = b.grid.num_azimuth_bins();
  const GridArray probs = b.probabilities();

  BeliefSummary s;
  Scalar best = -1.0;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      const Scalar p = probs(i, j);
      if (p > best) {
        best = p;
        s.map_range_bin = i;
        s.map_azimuth_bin = j;
      }
    }
  }
  s.map_estimate = b.grid.bin_center(s.map_range_bin, s.map_azimuth_bin);

  // Circular moments of the azimuth marginal.
  Scalar cs = 0.0, sn = 0.0;
  for (int j = 0; j < na; ++j) {
    const Scalar mass = probs.col(j).sum();
    const Scalar th = deg_to_rad(b.grid.azimuth_center(j));
    cs += mass * std::cos(th);
    sn += mass * std::sin(th);
  }
  const Scalar resultant = std::max(std::sqrt(cs * cs + sn * sn), 1e-300);
  s.theta_uncertainty_deg = rad_to_deg(std::sqrt(std::max(0.0, -2.0 * std::log(resultant))));

  // Linear moments of the range marginal.
  Scalar mean_r = 0.0, mean_r2 = 0.0;
  for (int i = 0; i < nr; ++i) {
    const Scalar mass = probs.row(i).sum();
    const Scalar r = b.grid.range_center(i);
    mean_r += mass * r;
    mean_r2 += mass * r * r;
  }
  s.r_uncertainty_m = std::sqrt(std::max(0.0, mean_r2 - mean_r * mean_r));

  Scalar h = 0.0;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < na; ++j) {
      const Scalar p = probs(i, j);
      if (p > 0.0) h -= p * std::log(p);
    }
  s.entropy_nats = h;
  return s;
}

}  // namespace avsearch
