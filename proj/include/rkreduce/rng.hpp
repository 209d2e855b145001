#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rkreduce {

// Counter-based splittable generator (splitmix64 finalizer over a Weyl
// sequence). Streams derived from (master seed, stream index) are
// independent for all practical purposes, so batch drivers can hand one
// stream to each sample index and get results that do not depend on
// scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  std::uint64_t operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // One stream per sample index: the index is mixed into the master seed
  // so that partial re-runs of an index range agree with full runs.
  static SplitMix64 stream(std::uint64_t master, std::uint64_t index) {
    return SplitMix64(mix(master ^ mix(index + 0x9e3779b97f4a7c15ULL)));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Uniform on [0, 1), 53-bit resolution.
inline double uniform01(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1]; safe as a log() argument.
inline double uniform_pos(SplitMix64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1); safe on both ends.
inline double uniform_open(SplitMix64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller. Two uniforms per variate keeps the
// draw count deterministic per call.
inline double sample_normal(SplitMix64& rng) {
  const double u1 = uniform_pos(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Exp(1).
inline double sample_exponential(SplitMix64& rng) {
  return -std::log(uniform_pos(rng));
}

// Laplace(0, 1) by inverse CDF.
inline double sample_laplace(SplitMix64& rng) {
  const double u = uniform_open(rng) - 0.5;
  return u >= 0.0 ? -std::log(1.0 - 2.0 * u) : std::log(1.0 + 2.0 * u);
}

// Standard logistic with unit variance (scale sqrt(3)/pi).
inline double sample_logistic_unitvar(SplitMix64& rng) {
  const double u = uniform_open(rng);
  constexpr double kScale = 0.5513288954217920310256;  // sqrt(3)/pi
  return kScale * std::log(u / (1.0 - u));
}

}  // namespace rkreduce
