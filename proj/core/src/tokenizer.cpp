// SPDX-License-Identifier: Apache-2.0
#include "sasa/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "sasa/error.hpp"

namespace sasa::tokenizer {
namespace {

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> kReserved = {"[PAD]", "[CLS]", "[SEP]", "[UNK]"};
  return kReserved;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_punct(unsigned char c) {
  return c < 0x80 && c != '_' && ((c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) ||
                                  (c >= 0x5b && c <= 0x60) || (c >= 0x7b && c <= 0x7e));
}

}  // namespace

std::vector<ByteSpan> split_surface(std::string_view source) {
  std::vector<ByteSpan> spans;
  std::size_t i = 0;
  while (i < source.size()) {
    const auto c = static_cast<unsigned char>(source[i]);
    if (is_space(c)) {
      ++i;
    } else if (is_punct(c)) {
      spans.push_back({i, i + 1});
      ++i;
    } else {
      const std::size_t start = i;
      while (i < source.size()) {
        const auto d = static_cast<unsigned char>(source[i]);
        if (is_space(d) || is_punct(d)) break;
        ++i;
      }
      spans.push_back({start, i});
    }
  }
  return spans;
}

Vocabulary::Vocabulary() : Vocabulary(reserved_tokens()) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  const auto& reserved = reserved_tokens();
  if (tokens_.size() < kNumReserved ||
      !std::equal(reserved.begin(), reserved.end(), tokens_.begin())) {
    throw InvalidArgument("Vocabulary: first four tokens must be [PAD] [CLS] [SEP] [UNK]");
  }
  index_.reserve(tokens_.size());
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    const std::string& tok = tokens_[id];
    if (tok.empty()) throw InvalidArgument("Vocabulary: empty token at id " + std::to_string(id));
    if (std::any_of(tok.begin(), tok.end(), [](char c) { return is_space(c); })) {
      throw InvalidArgument("Vocabulary: token at id " + std::to_string(id) +
                            " contains whitespace");
    }
    if (!index_.emplace(tok, static_cast<TokenId>(id)).second) {
      throw InvalidArgument("Vocabulary: duplicate token '" + tok + "'");
    }
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) throw InvalidArgument("Vocabulary: id out of range");
  return tokens_[id];
}

TokenId Vocabulary::lookup(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

Vocabulary build_vocabulary(std::span<const std::string> corpus, std::size_t max_size) {
  if (corpus.empty()) throw InvalidArgument("build_vocabulary: empty corpus");
  if (max_size <= kNumReserved) {
    throw InvalidArgument("build_vocabulary: max_size must exceed the 4 reserved tokens");
  }
  std::map<std::string, std::size_t> counts;
  for (const std::string& text : corpus) {
    for (const ByteSpan& span : split_surface(text)) {
      ++counts[text.substr(span.begin, span.length())];
    }
  }
  const auto& reserved = reserved_tokens();
  for (const auto& r : reserved) counts.erase(r);

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens(reserved.begin(), reserved.end());
  for (auto& [tok, count] : ranked) {
    if (tokens.size() >= max_size) break;
    tokens.push_back(std::move(tok));
  }
  return Vocabulary(std::move(tokens));
}

std::string_view TokenizedCode::surface(std::size_t index) const {
  const ByteSpan& s = spans.at(index);
  return std::string_view(source).substr(s.begin, s.length());
}

TokenizedCode tokenize(std::string_view source, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 3) throw InvalidArgument("tokenize: max_len must be >= 3");
  TokenizedCode out;
  out.source = std::string(source);
  const auto surface = split_surface(source);
  const std::size_t kept = std::min(surface.size(), max_len - 2);

  out.ids.reserve(kept + 2);
  out.spans.reserve(kept + 2);
  out.ids.push_back(kCls);
  out.spans.push_back({0, 0});
  for (std::size_t i = 0; i < kept; ++i) {
    out.ids.push_back(vocab.lookup(source.substr(surface[i].begin, surface[i].length())));
    out.spans.push_back(surface[i]);
  }
  const std::size_t tail = kept == 0 ? 0 : surface[kept - 1].end;
  out.ids.push_back(kSep);
  out.spans.push_back({tail, tail});
  return out;
}

void validate(const TokenizedCode& code, const Vocabulary& vocab) {
  if (code.ids.size() != code.spans.size()) {
    throw InvalidArgument("TokenizedCode: ids and spans differ in length");
  }
  if (code.ids.size() < 2 || code.ids.front() != kCls || code.ids.back() != kSep) {
    throw InvalidArgument("TokenizedCode: must start with CLS and end with SEP");
  }
  std::size_t prev_end = 0;
  bool first = true;
  for (std::size_t i = 0; i < code.ids.size(); ++i) {
    if (code.ids[i] >= vocab.size()) {
      throw InvalidArgument("TokenizedCode: id at " + std::to_string(i) + " exceeds |V|");
    }
    if (code.is_special(i)) continue;
    const ByteSpan& s = code.spans[i];
    if (s.end <= s.begin || s.end > code.source.size()) {
      throw InvalidArgument("TokenizedCode: bad span at token " + std::to_string(i));
    }
    if (!first && s.begin < prev_end) {
      throw InvalidArgument("TokenizedCode: spans overlap or regress at token " +
                            std::to_string(i));
    }
    prev_end = s.end;
    first = false;
  }
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& tok : vocab.tokens()) out << tok << '\n';
}

Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  try {
    return Vocabulary(std::move(tokens));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("vocab file: ") + e.what());
  }
}

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_vocabulary(out, vocab);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_vocabulary(in);
}

void write_token_dump(std::ostream& out, const TokenizedCode& code, const Vocabulary& vocab) {
  for (std::size_t i = 0; i < code.size(); ++i) {
    const ByteSpan& s = code.spans[i];
    out << code.ids[i] << '\t' << s.begin << '\t' << s.end << '\t';
    if (code.is_special(i)) {
      out << vocab.token(code.ids[i]);
    } else {
      out << code.surface(i);
    }
    out << '\n';
  }
}

}  // namespace sasa::tokenizer
