// SPDX-License-Identifier: Apache-2.0
#include "sasa/random.hpp"

namespace sasa {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-scale, scale);
  return m;
}

}  // namespace sasa
