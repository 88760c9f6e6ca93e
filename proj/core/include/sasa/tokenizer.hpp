// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sasa::tokenizer {

using TokenId = std::uint32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kCls = 1;
inline constexpr TokenId kSep = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr std::size_t kNumReserved = 4;
inline constexpr std::size_t kDefaultMaxLen = 1024;

/// PAD, CLS and SEP carry no source text. UNK does: it keeps its span.
constexpr bool is_special(TokenId id) noexcept { return id == kPad || id == kCls || id == kSep; }

/// Half-open byte range [begin, end) into the source text.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - begin; }
  bool contains(const ByteSpan& other) const noexcept {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

/// Splits source text into surface tokens: maximal runs of word bytes, and
/// every ASCII punctuation byte on its own. Whitespace separates.
std::vector<ByteSpan> split_surface(std::string_view source);

class Vocabulary {
 public:
  /// Reserved tokens only.
  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  /// UNK when the token is not known.
  TokenId lookup(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Reserved ids first, then surface tokens by descending frequency over the
/// corpus, ties broken lexicographically; truncated to max_size entries.
Vocabulary build_vocabulary(std::span<const std::string> corpus, std::size_t max_size);

struct TokenizedCode {
  std::vector<TokenId> ids;
  /// One span per id. Special tokens get an empty span at their position.
  std::vector<ByteSpan> spans;
  std::string source;

  std::size_t size() const noexcept { return ids.size(); }
  bool is_special(std::size_t index) const noexcept { return tokenizer::is_special(ids[index]); }
  std::string_view surface(std::size_t index) const;
};

/// [CLS] tokens... [SEP], keeping the first max_len - 2 surface tokens.
TokenizedCode tokenize(std::string_view source, const Vocabulary& vocab,
                       std::size_t max_len = kDefaultMaxLen);

/// Throws InvalidArgument naming the first broken invariant.
void validate(const TokenizedCode& code, const Vocabulary& vocab);

// Vocab file: one token per line, line number = id.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);
void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);

/// Token dump: `id<TAB>start_byte<TAB>end_byte<TAB>surface` per token.
void write_token_dump(std::ostream& out, const TokenizedCode& code, const Vocabulary& vocab);

}  // namespace sasa::tokenizer
