// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "sasa/block_reduce.hpp"
#include "sasa/syntax_tree.hpp"
#include "sasa/tokenizer.hpp"

namespace sasa::ast {

inline constexpr std::uint32_t kDefaultTreeDistance = 2;

/// Per token: the deepest node covering its span; nullopt for CLS/SEP/PAD.
using TokenAlignment = std::vector<std::optional<NodeId>>;

TokenAlignment align_tokens(const SyntaxTree& tree, const tokenizer::TokenizedCode& toks);

using TokenPair = std::pair<std::uint32_t, std::uint32_t>;

/// Token-level structural connections: (i, j) is present iff the aligned
/// nodes of tokens i and j are at most `max_distance` tree edges apart.
/// Stored with both orientations, sorted.
struct TokenAdjacency {
  std::size_t n = 0;
  std::uint32_t max_distance = kDefaultTreeDistance;
  std::vector<TokenPair> entries;

  bool contains(std::uint32_t i, std::uint32_t j) const;
  /// Weight-1 COO view for block reduction.
  std::vector<CooEntry> to_coo() const;

  friend bool operator==(const TokenAdjacency&, const TokenAdjacency&) = default;
};

TokenAdjacency build_token_adjacency(const SyntaxTree& tree, const tokenizer::TokenizedCode& toks,
                                     std::uint32_t max_distance = kDefaultTreeDistance);

/// Checks range, symmetry, sortedness, and (when `toks` is given) that
/// special tokens have no entries while every other token has its diagonal.
void validate(const TokenAdjacency& adj, const tokenizer::TokenizedCode* toks = nullptr);

// Adjacency file: `n=<n> D=<D>` header, then `i<TAB>j` lines with i <= j.
void write_adjacency(std::ostream& out, const TokenAdjacency& adj);
TokenAdjacency read_adjacency(std::istream& in);
void save_adjacency(const std::filesystem::path& path, const TokenAdjacency& adj);
TokenAdjacency load_adjacency(const std::filesystem::path& path);

}  // namespace sasa::ast
