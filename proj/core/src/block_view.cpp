// SPDX-License-Identifier: Apache-2.0
#include "sasa/block_view.hpp"

#include <algorithm>
#include <string>

#include "sasa/error.hpp"

namespace sasa {
namespace {

Matrix pad_rows(const Matrix& m, std::size_t total_rows) {
  Matrix out(total_rows, m.cols());
  std::copy(m.data().begin(), m.data().end(), out.data().begin());
  return out;
}

}  // namespace

BlockView::BlockView(const Matrix& m, std::size_t block_size)
    : rows_(m.rows()), block_size_(block_size) {
  if (block_size == 0) {
    throw InvalidArgument("block_reshape: block size must be >= 1");
  }
  num_blocks_ = ceil_div(rows_, block_size_);
  pad_len_ = num_blocks_ * block_size_ - rows_;
  padded_ = pad_rows(m, num_blocks_ * block_size_);
}

Matrix BlockView::flatten() const {
  const auto src = padded_.data().first(rows_ * dim());
  return Matrix(rows_, dim(), std::vector<double>(src.begin(), src.end()));
}

Matrix block_score(const BlockView& q, const BlockView& k, std::size_t i, std::size_t j) {
  if (q.block_size() != k.block_size() || q.dim() != k.dim()) {
    throw InvalidArgument("block_score: query and key views disagree on block size or width");
  }
  if (i >= q.num_blocks() || j >= k.num_blocks()) {
    throw InvalidArgument("block_score: block index (" + std::to_string(i) + "," +
                          std::to_string(j) + ") out of range");
  }
  const std::size_t b = q.block_size();
  Matrix tile(b, b);
  for (std::size_t s = 0; s < b; ++s) {
    const auto q_row = q.row(i, s);
    for (std::size_t t = 0; t < b; ++t) {
      const auto k_row = k.row(j, t);
      double acc = 0.0;
      for (std::size_t u = 0; u < q_row.size(); ++u) acc += q_row[u] * k_row[u];
      tile(s, t) = acc;
    }
  }
  return tile;
}

}  // namespace sasa
