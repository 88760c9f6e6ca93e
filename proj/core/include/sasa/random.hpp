// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "sasa/matrix.hpp"

namespace sasa {

/// The single generator behind every randomized command: std::mt19937_64
/// seeded with the run seed. Doubles are built from the top 53 bits, so
/// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

 private:
  std::mt19937_64 engine_;
};

/// rows×cols matrix with entries uniform in [-scale, scale).
Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0);

}  // namespace sasa
