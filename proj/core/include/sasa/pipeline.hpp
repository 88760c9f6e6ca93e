// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "sasa/adjacency.hpp"
#include "sasa/frequency.hpp"
#include "sasa/mask.hpp"
#include "sasa/syntax_tree.hpp"
#include "sasa/tokenizer.hpp"

namespace sasa {

/// Everything derived from one source file that the mask builder consumes.
struct PreparedInput {
  tokenizer::TokenizedCode tokens;
  ast::SyntaxTree tree;
  ast::TokenAdjacency adjacency;
  frequency::PairScoreMatrix pair_scores;
};

/// Tokenizes to at most max_len ids, parses, aligns and looks up pair
/// scores. A null frequency matrix yields all-zero pair scores.
PreparedInput prepare_input(std::string_view source, ast::Language lang,
                            const tokenizer::Vocabulary& vocab,
                            const frequency::FrequencyMatrix* frequency, std::size_t max_len,
                            std::uint32_t tree_distance = ast::kDefaultTreeDistance);

}  // namespace sasa
