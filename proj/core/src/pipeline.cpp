// SPDX-License-Identifier: Apache-2.0
#include "sasa/pipeline.hpp"

namespace sasa {

PreparedInput prepare_input(std::string_view source, ast::Language lang,
                            const tokenizer::Vocabulary& vocab,
                            const frequency::FrequencyMatrix* frequency, std::size_t max_len,
                            std::uint32_t tree_distance) {
  PreparedInput in;
  in.tokens = tokenizer::tokenize(source, vocab, max_len);
  in.tree = ast::parse_to_tree(source, lang);
  in.adjacency = ast::build_token_adjacency(in.tree, in.tokens, tree_distance);
  in.pair_scores = frequency != nullptr ? frequency::lookup_pair_scores(*frequency, in.tokens.ids)
                                        : frequency::zero_pair_scores(in.tokens.size());
  return in;
}

}  // namespace sasa
