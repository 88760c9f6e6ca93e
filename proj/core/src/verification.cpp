// SPDX-License-Identifier: Apache-2.0
#include "sasa/verification.hpp"

#include <algorithm>
#include <cmath>

#include "sasa/numeric.hpp"

namespace sasa::verify {

RandomStructure random_structure(Rng& rng, std::size_t n, double density) {
  RandomStructure s;
  s.pair_scores = frequency::zero_pair_scores(n);
  s.adjacency.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    s.adjacency.entries.emplace_back(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && rng.uniform() < density) s.pair_scores.values[i * n + j] = 1 + rng.below(9);
      if (i < j && rng.uniform() < density) {
        s.adjacency.entries.emplace_back(i, j);
        s.adjacency.entries.emplace_back(j, i);
      }
    }
  }
  std::sort(s.adjacency.entries.begin(), s.adjacency.entries.end());
  return s;
}

attention::AttentionTensors random_attention_case(Rng& rng, const mask::AttentionConfig& cfg,
                                                  std::size_t d_head, double density) {
  const RandomStructure s = random_structure(rng, cfg.n, density);
  attention::AttentionTensors t;
  t.mask = mask::build_mask(cfg, s.pair_scores, s.adjacency);
  t.block_size = cfg.b;
  t.q = random_matrix(rng, cfg.n, d_head);
  t.k = random_matrix(rng, cfg.n, d_head);
  t.v = random_matrix(rng, cfg.n, d_head);
  return t;
}

double max_oracle_deviation(const attention::AttentionTensors& t) {
  const Matrix sparse = attention::sparse_attention_forward(t).output;
  const Matrix dense = attention::dense_oracle(t);
  return max_abs_diff(sparse, dense);
}

namespace {

double frobenius(const Matrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

double relative(const Matrix& analytic, const Matrix& numeric) {
  Matrix diff = numeric;
  for (std::size_t c = 0; c < diff.size(); ++c) diff.data()[c] -= analytic.data()[c];
  const double scale = std::max(frobenius(analytic), frobenius(numeric));
  return scale == 0.0 ? 0.0 : frobenius(diff) / scale;
}

double loss(const attention::AttentionTensors& t, const Matrix& upstream) {
  const Matrix out = attention::sparse_attention_forward(t).output;
  double acc = 0.0;
  for (std::size_t c = 0; c < out.size(); ++c) acc += out.data()[c] * upstream.data()[c];
  return acc;
}

}  // namespace

double gradient_relative_error(const attention::AttentionTensors& t, Rng& rng, double eps) {
  const Matrix upstream = random_matrix(rng, t.q.rows(), t.v.cols());
  const attention::Gradients g = attention::attention_backward(t, upstream);

  attention::AttentionTensors probe = t;
  const Matrix dq = finite_diff_gradient(
      [&](const Matrix& q) {
        probe.q = q;
        return loss(probe, upstream);
      },
      t.q, eps);
  probe.q = t.q;
  const Matrix dk = finite_diff_gradient(
      [&](const Matrix& k) {
        probe.k = k;
        return loss(probe, upstream);
      },
      t.k, eps);
  probe.k = t.k;
  const Matrix dv = finite_diff_gradient(
      [&](const Matrix& v) {
        probe.v = v;
        return loss(probe, upstream);
      },
      t.v, eps);
  return std::max({relative(g.dq, dq), relative(g.dk, dk), relative(g.dv, dv)});
}

}  // namespace sasa::verify
