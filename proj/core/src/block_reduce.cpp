// SPDX-License-Identifier: Apache-2.0
#include "sasa/block_reduce.hpp"

#include <numeric>
#include <string>

#include "sasa/error.hpp"
#include "sasa/matrix.hpp"

namespace sasa::ast {

std::uint64_t BlockScores::total() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), std::uint64_t{0});
}

BlockScores block_reduce_sum(std::span<const CooEntry> entries, std::size_t n, std::size_t b) {
  if (b == 0) throw InvalidArgument("block_reduce_sum: block size must be >= 1");
  BlockScores out(ceil_div(n, b));
  for (const CooEntry& e : entries) {
    if (e.row >= n || e.col >= n) {
      throw InvalidArgument("block_reduce_sum: entry (" + std::to_string(e.row) + "," +
                            std::to_string(e.col) + ") outside " + std::to_string(n) + "x" +
                            std::to_string(n));
    }
    out.at(e.row / b, e.col / b) += e.value;
  }
  return out;
}

}  // namespace sasa::ast
