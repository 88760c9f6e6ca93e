// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "sasa/adjacency.hpp"
#include "sasa/attention.hpp"
#include "sasa/frequency.hpp"
#include "sasa/mask.hpp"
#include "sasa/random.hpp"

namespace sasa::verify {

/// Random sparse pair scores and token adjacency for an n-token input.
struct RandomStructure {
  frequency::PairScoreMatrix pair_scores;
  ast::TokenAdjacency adjacency;
};

/// Each off-diagonal cell is nonzero with probability `density`. Scores are
/// small integers; the adjacency is symmetric with its full diagonal.
RandomStructure random_structure(Rng& rng, std::size_t n, double density);

/// Mask from random structure plus random Q, K, V of width d_head.
attention::AttentionTensors random_attention_case(Rng& rng, const mask::AttentionConfig& cfg,
                                                  std::size_t d_head, double density = 0.05);

/// max |sparse_attention_forward - dense_oracle| over all output cells.
double max_oracle_deviation(const attention::AttentionTensors& t);

/// Relative error ||analytic - numeric|| / max(||analytic||, ||numeric||)
/// in the Frobenius norm, for the loss sum(U * O) with a random upstream U.
/// Computed separately for dQ, dK and dV; returns the worst.
double gradient_relative_error(const attention::AttentionTensors& t, Rng& rng, double eps);

}  // namespace sasa::verify
