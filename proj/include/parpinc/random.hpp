// SPDX-License-Identifier: Apache-2.0
//
// Seeded random streams. The engine is std::mt19937_64, whose output sequence
// is fixed by the C++ standard; every distribution below is implemented here
// rather than taken from <random> so draws are identical across standard
// libraries.

#pragma once

#include "parpinc/numeric.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace parpinc {

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64/splitmix64-seed/box-muller-v1";

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of stream `index` under `master`: splitmix64(master ^ splitmix64(index)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

  // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  cplx complex_normal();

  ComplexVector complex_normal_vector(Eigen::Index n);
  ComplexMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::mt19937_64 engine_;
};

}  // namespace parpinc
