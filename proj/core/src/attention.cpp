// SPDX-License-Identifier: Apache-2.0
#include "sasa/attention.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>

#include "sasa/block_view.hpp"
#include "sasa/error.hpp"
#include "sasa/numeric.hpp"

namespace sasa::attention {
namespace {

// Runs fn(begin, end, worker) over [0, count) split into contiguous chunks.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    fn(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t u = 0; u < a.size(); ++u) acc += a[u] * b[u];
  return acc;
}

}  // namespace

double AttentionTensors::effective_scale() const {
  return scale.value_or(1.0 / std::sqrt(static_cast<double>(q.cols())));
}

void AttentionTensors::validate() const {
  if (block_size == 0) throw InvalidArgument("attention: block size must be >= 1");
  const std::size_t n = q.rows();
  if (n == 0) throw InvalidArgument("attention: empty sequence");
  if (k.rows() != n || v.rows() != n) {
    throw InvalidArgument("attention: q, k, v must have the same number of rows");
  }
  if (k.cols() != q.cols()) throw InvalidArgument("attention: q and k widths differ");
  if (mask.num_blocks() != ceil_div(n, block_size)) {
    throw InvalidArgument("attention: mask has " + std::to_string(mask.num_blocks()) +
                          " blocks, expected " + std::to_string(ceil_div(n, block_size)));
  }
}

BlockSparseScores::BlockSparseScores(const mask::BlockMask& mask, std::size_t block_size)
    : block_size_(block_size), offsets_(mask.num_blocks() + 1, 0) {
  for (std::size_t i = 0; i < mask.num_blocks(); ++i) {
    offsets_[i + 1] = offsets_[i] + mask.row(i).size();
  }
  data_.assign(offsets_.back() * block_size * block_size, 0.0);
}

std::span<double> BlockSparseScores::tile(std::size_t i, std::size_t slot) {
  const std::size_t cells = block_size_ * block_size_;
  return std::span<double>(data_).subspan((offsets_[i] + slot) * cells, cells);
}

std::span<const double> BlockSparseScores::tile(std::size_t i, std::size_t slot) const {
  const std::size_t cells = block_size_ * block_size_;
  return std::span<const double>(data_).subspan((offsets_[i] + slot) * cells, cells);
}

Matrix BlockSparseScores::to_dense(const mask::BlockMask& mask, std::size_t n) const {
  const std::size_t b = block_size_;
  Matrix dense(n, n);
  for (std::size_t i = 0; i < mask.num_blocks(); ++i) {
    const auto row = mask.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto tile_cells = tile(i, c);
      for (std::size_t s = 0; s < b && i * b + s < n; ++s) {
        for (std::size_t t = 0; t < b && row[c] * b + t < n; ++t) {
          dense(i * b + s, row[c] * b + t) = tile_cells[s * b + t];
        }
      }
    }
  }
  return dense;
}

ForwardResult sparse_attention_forward(const AttentionTensors& t, const ForwardOptions& opts) {
  t.validate();
  const std::size_t n = t.q.rows();
  const std::size_t b = t.block_size;
  const double scale = t.effective_scale();
  const BlockView qv = block_reshape(t.q, b);
  const BlockView kv = block_reshape(t.k, b);

  for (std::size_t i = 0; i < t.mask.num_blocks(); ++i) {
    if (t.mask.row(i).empty()) {
      throw ContractViolation("sparse_attention_forward: query block " + std::to_string(i) +
                              " selects no key blocks");
    }
  }

  ForwardResult result{Matrix(n, t.v.cols()), BlockSparseScores(t.mask, b)};
  auto& probs = result.probabilities;

  parallel_for(t.mask.num_blocks(), opts.threads, [&](std::size_t first, std::size_t last,
                                                      std::size_t) {
    std::vector<double> row_buf;
    std::vector<std::uint8_t> allowed;
    for (std::size_t i = first; i < last; ++i) {
      const auto keys = t.mask.row(i);
      for (std::size_t c = 0; c < keys.size(); ++c) {
        const Matrix tile = block_score(qv, kv, i, keys[c]);
        std::copy(tile.data().begin(), tile.data().end(), probs.tile(i, c).begin());
      }
      row_buf.resize(keys.size() * b);
      allowed.resize(keys.size() * b);
      for (std::size_t s = 0; s < b; ++s) {
        const std::size_t query = i * b + s;
        if (query >= n) {
          for (std::size_t c = 0; c < keys.size(); ++c) {
            std::fill_n(probs.tile(i, c).begin() + static_cast<std::ptrdiff_t>(s * b), b, 0.0);
          }
          continue;
        }
        for (std::size_t c = 0; c < keys.size(); ++c) {
          const auto cells = probs.tile(i, c);
          for (std::size_t u = 0; u < b; ++u) {
            row_buf[c * b + u] = cells[s * b + u];
            allowed[c * b + u] = keys[c] * b + u < n ? 1 : 0;
          }
        }
        masked_row_softmax_inplace(row_buf, allowed, scale);
        auto out_row = result.output.row(query);
        for (std::size_t c = 0; c < keys.size(); ++c) {
          auto cells = probs.tile(i, c);
          for (std::size_t u = 0; u < b; ++u) {
            const double p = row_buf[c * b + u];
            cells[s * b + u] = p;
            const std::size_t key = keys[c] * b + u;
            if (key >= n) continue;
            const auto v_row = t.v.row(key);
            for (std::size_t d = 0; d < out_row.size(); ++d) out_row[d] += p * v_row[d];
          }
        }
      }
    }
  });
  return result;
}

Matrix dense_oracle(const AttentionTensors& t) {
  t.validate();
  const std::size_t n = t.q.rows();
  const std::size_t b = t.block_size;
  const double scale = t.effective_scale();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  Matrix out(n, t.v.cols());
  std::vector<double> logits(n);
  for (std::size_t i = 0; i < n; ++i) {
    double peak = neg_inf;
    for (std::size_t j = 0; j < n; ++j) {
      const bool allowed = t.mask.contains(static_cast<std::uint32_t>(i / b),
                                           static_cast<std::uint32_t>(j / b));
      logits[j] = allowed ? scale * dot(t.q.row(i), t.k.row(j)) : neg_inf;
      peak = std::max(peak, logits[j]);
    }
    if (peak == neg_inf) {
      throw ContractViolation("dense_oracle: query " + std::to_string(i) + " attends to nothing");
    }
    double total = 0.0;
    for (double& l : logits) {
      l = std::exp(l - peak);
      total += l;
    }
    const double inv = 1.0 / total;
    auto out_row = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = logits[j] * inv;
      if (p == 0.0) continue;
      const auto v_row = t.v.row(j);
      for (std::size_t d = 0; d < out_row.size(); ++d) out_row[d] += p * v_row[d];
    }
  }
  return out;
}

Gradients attention_backward(const AttentionTensors& t, const ForwardResult& forward,
                             const Matrix& upstream, const ForwardOptions& opts) {
  t.validate();
  const std::size_t n = t.q.rows();
  const std::size_t b = t.block_size;
  const double scale = t.effective_scale();
  if (upstream.rows() != n || upstream.cols() != t.v.cols()) {
    throw InvalidArgument("attention_backward: upstream gradient has the wrong shape");
  }
  const auto& probs = forward.probabilities;
  const std::size_t nb = t.mask.num_blocks();
  const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, nb));

  Gradients g{Matrix(n, t.q.cols()), Matrix(n, t.k.cols()), Matrix(n, t.v.cols())};
  // dq rows are owned by their query block; dk/dv are scattered, so each
  // worker accumulates privately and the partials are summed in order.
  std::vector<Matrix> dk_parts(threads, Matrix(n, t.k.cols()));
  std::vector<Matrix> dv_parts(threads, Matrix(n, t.v.cols()));

  parallel_for(nb, threads, [&](std::size_t first, std::size_t last, std::size_t worker) {
    Matrix& dk = dk_parts[worker];
    Matrix& dv = dv_parts[worker];
    std::vector<double> dlogits;
    for (std::size_t i = first; i < last; ++i) {
      const auto keys = t.mask.row(i);
      dlogits.resize(keys.size() * b);
      for (std::size_t s = 0; s < b; ++s) {
        const std::size_t query = i * b + s;
        if (query >= n) break;
        const auto d_out = upstream.row(query);
        // dP = dO · Vᵀ and the row's expectation Σ p · dP.
        double expected = 0.0;
        for (std::size_t c = 0; c < keys.size(); ++c) {
          const auto cells = probs.tile(i, c);
          for (std::size_t u = 0; u < b; ++u) {
            const std::size_t key = keys[c] * b + u;
            double dp = 0.0;
            if (key < n) {
              dp = dot(d_out, t.v.row(key));
              const double p = cells[s * b + u];
              auto dv_row = dv.row(key);
              for (std::size_t d = 0; d < dv_row.size(); ++d) dv_row[d] += p * d_out[d];
            }
            dlogits[c * b + u] = dp;
            expected += cells[s * b + u] * dp;
          }
        }
        auto dq_row = g.dq.row(query);
        const auto q_row = t.q.row(query);
        for (std::size_t c = 0; c < keys.size(); ++c) {
          const auto cells = probs.tile(i, c);
          for (std::size_t u = 0; u < b; ++u) {
            const std::size_t key = keys[c] * b + u;
            if (key >= n) continue;
            const double ds = scale * cells[s * b + u] * (dlogits[c * b + u] - expected);
            if (ds == 0.0) continue;
            const auto k_row = t.k.row(key);
            auto dk_row = dk.row(key);
            for (std::size_t d = 0; d < dq_row.size(); ++d) {
              dq_row[d] += ds * k_row[d];
              dk_row[d] += ds * q_row[d];
            }
          }
        }
      }
    }
  });

  for (std::size_t w = 0; w < threads; ++w) {
    for (std::size_t c = 0; c < g.dk.size(); ++c) g.dk.data()[c] += dk_parts[w].data()[c];
    for (std::size_t c = 0; c < g.dv.size(); ++c) g.dv.data()[c] += dv_parts[w].data()[c];
  }
  return g;
}

Gradients attention_backward(const AttentionTensors& t, const Matrix& upstream) {
  return attention_backward(t, sparse_attention_forward(t), upstream);
}

}  // namespace sasa::attention
