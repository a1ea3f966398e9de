#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "avsearch/types.hpp"

namespace avsearch {

// mt19937_64 engine with hand-rolled distributions. The standard
// distribution templates are implementation-defined, so sampling through
// them would break seed-for-seed reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  Scalar uniform() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    const std::uint64_t all = ~std::uint64_t{0};
    const std::uint64_t limit = all - (all % n);
    std::uint64_t u = next_u64();
    while (u >= limit) u = next_u64();
    return u % n;
  }

  // Box-Muller; one variate per call, the sine companion is discarded to
  // keep the consumed stream length independent of call history.
  Scalar normal(Scalar mean, Scalar stddev) {
    Scalar u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const Scalar u2 = uniform();
    const Scalar z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    return mean + stddev * z;
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64-style mixing for deriving independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                              std::uint64_t d) {
  return mix_seed(mix_seed(a, b, c), d);
}

}  // namespace avsearch
