// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "sasa/block_reduce.hpp"
#include "sasa/matrix.hpp"
#include "sasa/tokenizer.hpp"

namespace sasa::frequency {

using tokenizer::TokenId;

inline constexpr double kDefaultThreshold = 0.1;

struct FrequencyEntry {
  TokenId from = 0;
  TokenId to = 0;
  std::uint64_t count = 0;

  friend bool operator==(const FrequencyEntry&, const FrequencyEntry&) = default;
};

/// Sparse directed |V|×|V| count matrix: counts[a][b] is the number of
/// (query, key) position pairs with token ids (a, b) whose attention weight
/// exceeded the threshold, summed over every sample seen.
class FrequencyMatrix {
 public:
  explicit FrequencyMatrix(std::size_t vocab_size = 0, double threshold = kDefaultThreshold);

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  double threshold() const noexcept { return threshold_; }
  std::uint64_t samples_seen() const noexcept { return samples_seen_; }
  std::size_t nonzero() const noexcept { return counts_.size(); }

  std::uint64_t count(TokenId from, TokenId to) const;
  void increment(TokenId from, TokenId to, std::uint64_t by = 1);
  void add_samples(std::uint64_t n) noexcept { samples_seen_ += n; }
  std::uint64_t total() const noexcept;

  /// Adds another shard's counts. Vocabulary size and threshold must agree.
  void merge(const FrequencyMatrix& other);

  /// Entries ordered by (from, to).
  std::vector<FrequencyEntry> sorted_entries() const;

  friend bool operator==(const FrequencyMatrix&, const FrequencyMatrix&) = default;

 private:
  static std::uint64_t key(TokenId a, TokenId b) noexcept {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::size_t vocab_size_;
  double threshold_;
  std::uint64_t samples_seen_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
};

/// Counts one sample: every (i, j) with attn(i, j) > fm.threshold() bumps
/// counts[ids[i]][ids[j]]. attn must be n×n with rows summing to 1.
void accumulate_frequency(FrequencyMatrix& fm, std::span<const TokenId> ids, const Matrix& attn);

/// Same, with an explicit threshold that must match the one fm was built with.
void accumulate_frequency(FrequencyMatrix& fm, std::span<const TokenId> ids, const Matrix& attn,
                          double threshold);

enum class HeadReduction { Mean, Max };

/// Multi-head/multi-layer attention for one sample. Mean averages the maps
/// before thresholding; Max counts a pair if any single map exceeds it.
void accumulate_frequency(FrequencyMatrix& fm, std::span<const TokenId> ids,
                          std::span<const Matrix> attention_maps, HeadReduction reduction);

/// n×n per-input pair scores looked up from a FrequencyMatrix.
struct PairScoreMatrix {
  std::size_t n = 0;
  std::vector<std::uint64_t> values;

  std::uint64_t at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  std::vector<ast::CooEntry> to_coo() const;

  friend bool operator==(const PairScoreMatrix&, const PairScoreMatrix&) = default;
};

PairScoreMatrix zero_pair_scores(std::size_t n);
PairScoreMatrix lookup_pair_scores(const FrequencyMatrix& fm, std::span<const TokenId> ids);

// Frequency file: `|V|=<size> samples=<count> threshold=<t>` header, then
// `i<TAB>j<TAB>count` lines sorted by (i, j).
void write_frequency(std::ostream& out, const FrequencyMatrix& fm);
FrequencyMatrix read_frequency(std::istream& in);
void save_frequency(const std::filesystem::path& path, const FrequencyMatrix& fm);
FrequencyMatrix load_frequency(const std::filesystem::path& path);

}  // namespace sasa::frequency
