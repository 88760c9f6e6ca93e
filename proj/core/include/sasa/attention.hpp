// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sasa/mask.hpp"
#include "sasa/matrix.hpp"

namespace sasa::attention {

/// One head's inputs: n×d_head query, key and value matrices plus the block
/// mask that decides which b×b score tiles exist.
struct AttentionTensors {
  Matrix q;
  Matrix k;
  Matrix v;
  mask::BlockMask mask;
  std::size_t block_size = 32;
  /// Softmax temperature; 1/sqrt(d_head) when unset.
  std::optional<double> scale;

  double effective_scale() const;
  /// Throws InvalidArgument on inconsistent shapes or mask size.
  void validate() const;
};

/// Attention weights stored only for selected tiles: for each query block,
/// one b×b tile per selected key block, in mask order. Cells that touch
/// padded rows or columns stay zero.
class BlockSparseScores {
 public:
  BlockSparseScores() = default;
  BlockSparseScores(const mask::BlockMask& mask, std::size_t block_size);

  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t num_blocks() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Selected tiles in query block `i`.
  std::size_t tiles_in_row(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

  std::span<double> tile(std::size_t i, std::size_t slot);
  std::span<const double> tile(std::size_t i, std::size_t slot) const;

  /// Score cells held: selected tiles × b².
  std::size_t cells() const noexcept { return data_.size(); }
  std::size_t bytes() const noexcept { return data_.capacity() * sizeof(double); }

  /// Expands to n×n using the mask the buffer was built from.
  Matrix to_dense(const mask::BlockMask& mask, std::size_t n) const;

 private:
  std::size_t block_size_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> data_;
};

struct ForwardOptions {
  /// Worker threads over query blocks; 1 runs inline.
  std::size_t threads = 1;
};

struct ForwardResult {
  Matrix output;
  BlockSparseScores probabilities;
};

/// Block-sparse scaled dot-product attention. Each query row is normalized
/// once over the union of key positions in its selected blocks.
ForwardResult sparse_attention_forward(const AttentionTensors& t, const ForwardOptions& opts = {});

/// Dense n×n reference: scores outside the expanded mask are set to -inf
/// before an ordinary softmax.
Matrix dense_oracle(const AttentionTensors& t);

struct Gradients {
  Matrix dq;
  Matrix dk;
  Matrix dv;
};

/// Exact gradients of sparse_attention_forward with respect to q, k and v.
Gradients attention_backward(const AttentionTensors& t, const ForwardResult& forward,
                             const Matrix& upstream, const ForwardOptions& opts = {});
/// Convenience overload that reruns the forward pass.
Gradients attention_backward(const AttentionTensors& t, const Matrix& upstream);

}  // namespace sasa::attention
