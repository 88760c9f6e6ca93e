// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

#include "sasa/matrix.hpp"

namespace sasa {

/// An n×d matrix viewed as ⌈n/b⌉ blocks of b rows each.
///
/// The trailing block is zero-padded up to b rows; padded rows are
/// reported by is_pad() so callers can exclude them from attention.
class BlockView {
 public:
  BlockView(const Matrix& m, std::size_t block_size);

  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t num_blocks() const noexcept { return num_blocks_; }
  std::size_t pad_len() const noexcept { return pad_len_; }
  /// Rows of the unpadded source matrix.
  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return padded_.cols(); }

  /// Row s of block i (length dim()).
  std::span<const double> row(std::size_t block, std::size_t s) const noexcept {
    return padded_.row(block * block_size_ + s);
  }
  bool is_pad(std::size_t block, std::size_t s) const noexcept {
    return block * block_size_ + s >= rows_;
  }

  /// Drops the padding and returns the original n×d matrix.
  Matrix flatten() const;

 private:
  Matrix padded_;
  std::size_t rows_;
  std::size_t block_size_;
  std::size_t num_blocks_;
  std::size_t pad_len_;
};

inline BlockView block_reshape(const Matrix& m, std::size_t block_size) {
  return BlockView(m, block_size);
}

/// b×b score tile: entry (s,t) = Σ_u Q'[i,s,u] · K'[j,t,u].
Matrix block_score(const BlockView& q, const BlockView& k, std::size_t i, std::size_t j);

}  // namespace sasa
