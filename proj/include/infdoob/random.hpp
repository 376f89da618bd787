#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "infdoob/filtration.hpp"

namespace infdoob {

// Independent stream for (seed, index); used for per-trial determinism.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::exp(std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo)));
}

inline Rv random_rv(std::size_t leaves, std::mt19937_64& rng, double lo,
                    double hi) {
  Rv r{std::vector<double>(leaves)};
  for (double& x : r.values) x = log_uniform(rng, lo, hi);
  return r;
}

}  // namespace infdoob
