// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sasa::ast {

/// One nonzero cell of a sparse n×n integer matrix.
struct CooEntry {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::uint64_t value = 0;

  friend bool operator==(const CooEntry&, const CooEntry&) = default;
};

/// Dense ⌈n/b⌉×⌈n/b⌉ matrix of exact integer block sums.
class BlockScores {
 public:
  BlockScores() = default;
  explicit BlockScores(std::size_t num_blocks)
      : num_blocks_(num_blocks), values_(num_blocks * num_blocks, 0) {}

  std::size_t num_blocks() const noexcept { return num_blocks_; }
  std::uint64_t& at(std::size_t i, std::size_t j) { return values_[i * num_blocks_ + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return values_[i * num_blocks_ + j]; }
  std::span<const std::uint64_t> row(std::size_t i) const {
    return std::span<const std::uint64_t>(values_).subspan(i * num_blocks_, num_blocks_);
  }
  std::uint64_t total() const noexcept;

  friend bool operator==(const BlockScores&, const BlockScores&) = default;

 private:
  std::size_t num_blocks_ = 0;
  std::vector<std::uint64_t> values_;
};

/// Sums every entry into the b×b tile containing it. Entries must lie
/// inside the n×n square; b must be at least 1.
BlockScores block_reduce_sum(std::span<const CooEntry> entries, std::size_t n, std::size_t b);

}  // namespace sasa::ast
