// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sasa/adjacency.hpp"
#include "sasa/block_reduce.hpp"
#include "sasa/frequency.hpp"
#include "sasa/matrix.hpp"

namespace sasa::mask {

/// Which block patterns selected a pair. Bit order matches the LGTA
/// provenance string written to mask files.
enum PatternBit : std::uint8_t {
  kLocal = 1u << 0,
  kGlobal = 1u << 1,
  kTopK = 1u << 2,
  kAst = 1u << 3,
};
using Provenance = std::uint8_t;

/// Four characters `LGTA`, with '-' for every unset bit.
std::string provenance_string(Provenance p);
Provenance parse_provenance(std::string_view text);

struct AttentionConfig {
  std::size_t n = 1024;
  std::size_t b = 32;
  /// Sliding window width in blocks; odd.
  std::size_t w = 3;
  std::vector<std::uint32_t> global_blocks = {0, 1};
  /// Top-k budget for the frequency pattern.
  std::size_t k = 3;
  /// Budget for the AST pattern; defaults to k.
  std::optional<std::size_t> ast_k;
  bool use_topk = true;
  bool use_ast = true;
  std::size_t d_model = 64;
  std::size_t heads = 4;

  std::size_t num_blocks() const noexcept { return b == 0 ? 0 : ceil_div(n, b); }
  std::size_t ast_budget() const noexcept { return ast_k.value_or(k); }

  /// Throws InvalidArgument naming the broken invariant.
  void validate() const;
};

struct BlockPair {
  std::uint32_t query = 0;
  std::uint32_t key = 0;

  friend auto operator<=>(const BlockPair&, const BlockPair&) = default;
};

/// Sorted, duplicate-free set of block coordinates.
using PairSet = std::vector<BlockPair>;

/// Pairs with |i - j| <= floor(w / 2).
PairSet local_pattern(const AttentionConfig& cfg);
/// Pairs with i in g or j in g.
PairSet global_pattern(const AttentionConfig& cfg);
/// Per query row, the k highest-scoring key blocks. Ties go to the smaller
/// block index; zero-score blocks are never selected.
PairSet topk_pattern(const ast::BlockScores& scores, std::size_t k);

/// Selected key blocks per query block, with per-pair provenance.
class BlockMask {
 public:
  BlockMask() = default;
  explicit BlockMask(std::size_t num_blocks);

  /// Every block pair, provenance Local. Equivalent to dense attention.
  static BlockMask full(std::size_t num_blocks);

  /// ORs `bits` into the pair's provenance, selecting it if needed.
  void add(std::uint32_t query, std::uint32_t key, Provenance bits);
  void add_all(const PairSet& pairs, Provenance bits);

  std::size_t num_blocks() const noexcept { return rows_.size(); }
  std::span<const std::uint32_t> row(std::size_t query) const { return rows_.at(query); }
  std::span<const Provenance> row_provenance(std::size_t query) const {
    return provenance_.at(query);
  }
  bool contains(std::uint32_t query, std::uint32_t key) const;
  /// Zero when the pair is not selected.
  Provenance provenance(std::uint32_t query, std::uint32_t key) const;
  std::size_t selected_count() const noexcept;
  PairSet pairs() const;

  /// Diagonal present, rows nonempty, indices in range, provenance nonzero.
  void validate() const;

  friend bool operator==(const BlockMask&, const BlockMask&) = default;

 private:
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<std::vector<Provenance>> provenance_;
};

/// Union of the local, global, top-k(P') and top-k(T') patterns, where P'
/// and T' are the block sums of the pair scores and the token adjacency.
BlockMask build_mask(const AttentionConfig& cfg, const frequency::PairScoreMatrix& pair_scores,
                     const ast::TokenAdjacency& adjacency);

/// Mask file header fields.
struct MaskHeader {
  std::size_t n = 0;
  std::size_t b = 0;
  std::size_t w = 0;
  std::vector<std::uint32_t> global_blocks;
  std::size_t k = 0;

  static MaskHeader from_config(const AttentionConfig& cfg);
  friend bool operator==(const MaskHeader&, const MaskHeader&) = default;
};

struct MaskFile {
  MaskHeader header;
  BlockMask mask;

  friend bool operator==(const MaskFile&, const MaskFile&) = default;
};

// Mask file: `n=<n> b=<b> w=<w> g=<csv> k=<k>` header, then sorted
// `i<TAB>j<TAB>LGTA` lines.
void write_mask(std::ostream& out, const MaskHeader& header, const BlockMask& mask);
MaskFile read_mask(std::istream& in);
void save_mask(const std::filesystem::path& path, const MaskHeader& header, const BlockMask& mask);
MaskFile load_mask(const std::filesystem::path& path);

}  // namespace sasa::mask
