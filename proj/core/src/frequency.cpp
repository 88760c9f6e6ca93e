// SPDX-License-Identifier: Apache-2.0
#include "sasa/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>

#include "sasa/error.hpp"
#include "text_format.hpp"

namespace sasa::frequency {
namespace {

constexpr double kRowSumTolerance = 1e-6;

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("frequency threshold must lie in (0, 1)");
  }
}

void check_sample(const FrequencyMatrix& fm, std::span<const TokenId> ids, const Matrix& attn) {
  const std::size_t n = ids.size();
  if (attn.rows() != n || attn.cols() != n) {
    throw InvalidArgument("accumulate_frequency: attention is " + std::to_string(attn.rows()) +
                          "x" + std::to_string(attn.cols()) + " but sample has " +
                          std::to_string(n) + " tokens");
  }
  for (TokenId id : ids) {
    if (id >= fm.vocab_size()) {
      throw InvalidArgument("accumulate_frequency: token id " + std::to_string(id) +
                            " >= |V|");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = attn.row(i);
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw InvalidArgument("accumulate_frequency: attention row " + std::to_string(i) +
                            " sums to " + std::to_string(sum));
    }
  }
}

}  // namespace

FrequencyMatrix::FrequencyMatrix(std::size_t vocab_size, double threshold)
    : vocab_size_(vocab_size), threshold_(threshold) {
  check_threshold(threshold);
}

std::uint64_t FrequencyMatrix::count(TokenId from, TokenId to) const {
  const auto it = counts_.find(key(from, to));
  return it == counts_.end() ? 0 : it->second;
}

void FrequencyMatrix::increment(TokenId from, TokenId to, std::uint64_t by) {
  if (from >= vocab_size_ || to >= vocab_size_) {
    throw InvalidArgument("FrequencyMatrix: id out of range");
  }
  if (by > 0) counts_[key(from, to)] += by;
}

std::uint64_t FrequencyMatrix::total() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& [k, c] : counts_) sum += c;
  return sum;
}

void FrequencyMatrix::merge(const FrequencyMatrix& other) {
  if (other.vocab_size_ != vocab_size_ || other.threshold_ != threshold_) {
    throw InvalidArgument("FrequencyMatrix::merge: vocabulary size or threshold differ");
  }
  for (const auto& [k, c] : other.counts_) counts_[k] += c;
  samples_seen_ += other.samples_seen_;
}

std::vector<FrequencyEntry> FrequencyMatrix::sorted_entries() const {
  std::vector<FrequencyEntry> out;
  out.reserve(counts_.size());
  for (const auto& [k, c] : counts_) {
    out.push_back({static_cast<TokenId>(k >> 32), static_cast<TokenId>(k & 0xffffffffu), c});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  return out;
}

void accumulate_frequency(FrequencyMatrix& fm, std::span<const TokenId> ids, const Matrix& attn) {
  check_sample(fm, ids, attn);
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = attn.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] > fm.threshold()) fm.increment(ids[i], ids[j]);
    }
  }
  fm.add_samples(1);
}

void accumulate_frequency(FrequencyMatrix& fm, std::span<const TokenId> ids, const Matrix& attn,
                          double threshold) {
  check_threshold(threshold);
  if (threshold != fm.threshold()) {
    throw InvalidArgument("accumulate_frequency: threshold differs from the matrix's own");
  }
  accumulate_frequency(fm, ids, attn);
}

void accumulate_frequency(FrequencyMatrix& fm, std::span<const TokenId> ids,
                          std::span<const Matrix> attention_maps, HeadReduction reduction) {
  if (attention_maps.empty()) {
    throw InvalidArgument("accumulate_frequency: no attention maps");
  }
  for (const Matrix& m : attention_maps) check_sample(fm, ids, m);
  const std::size_t n = ids.size();
  Matrix combined(n, n);
  for (const Matrix& m : attention_maps) {
    for (std::size_t c = 0; c < combined.size(); ++c) {
      double& dst = combined.data()[c];
      dst = reduction == HeadReduction::Mean ? dst + m.data()[c] : std::max(dst, m.data()[c]);
    }
  }
  if (reduction == HeadReduction::Mean) {
    const double inv = 1.0 / static_cast<double>(attention_maps.size());
    for (double& v : combined.data()) v *= inv;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (combined(i, j) > fm.threshold()) fm.increment(ids[i], ids[j]);
    }
  }
  fm.add_samples(1);
}

std::vector<ast::CooEntry> PairScoreMatrix::to_coo() const {
  std::vector<ast::CooEntry> coo;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (const auto v = at(i, j); v != 0) {
        coo.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), v});
      }
    }
  }
  return coo;
}

PairScoreMatrix zero_pair_scores(std::size_t n) { return PairScoreMatrix{n, std::vector<std::uint64_t>(n * n, 0)}; }

PairScoreMatrix lookup_pair_scores(const FrequencyMatrix& fm, std::span<const TokenId> ids) {
  for (TokenId id : ids) {
    if (id >= fm.vocab_size()) {
      throw InvalidArgument("lookup_pair_scores: token id " + std::to_string(id) + " >= |V|");
    }
  }
  PairScoreMatrix out = zero_pair_scores(ids.size());
  if (fm.nonzero() == 0) return out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < ids.size(); ++j) {
      out.values[i * out.n + j] = fm.count(ids[i], ids[j]);
    }
  }
  return out;
}

void write_frequency(std::ostream& out, const FrequencyMatrix& fm) {
  out << "|V|=" << fm.vocab_size() << " samples=" << fm.samples_seen()
      << " threshold=" << detail::format_double(fm.threshold()) << '\n';
  for (const auto& e : fm.sorted_entries()) {
    out << e.from << '\t' << e.to << '\t' << e.count << '\n';
  }
}

FrequencyMatrix read_frequency(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("frequency file: missing header");
  const auto header = detail::parse_header(line, {"|V|", "samples", "threshold"},
                                           "frequency file");
  const auto vocab = detail::parse_number<std::size_t>(header[0], "frequency |V|");
  const auto samples = detail::parse_number<std::uint64_t>(header[1], "frequency samples");
  const auto threshold = detail::parse_number<double>(header[2], "frequency threshold");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw FormatError("frequency file: threshold outside (0, 1)");
  }
  FrequencyMatrix fm(vocab, threshold);
  fm.add_samples(samples);
  std::size_t line_no = 1;
  std::optional<std::pair<TokenId, TokenId>> previous;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3) {
      throw FormatError("frequency file line " + std::to_string(line_no) +
                        ": expected i<TAB>j<TAB>count");
    }
    const auto i = detail::parse_number<TokenId>(fields[0], "frequency i");
    const auto j = detail::parse_number<TokenId>(fields[1], "frequency j");
    const auto c = detail::parse_number<std::uint64_t>(fields[2], "frequency count");
    if (i >= vocab || j >= vocab || c == 0) {
      throw FormatError("frequency file line " + std::to_string(line_no) +
                        ": id out of range or zero count");
    }
    if (previous && std::tie(i, j) <= std::tie(previous->first, previous->second)) {
      throw FormatError("frequency file line " + std::to_string(line_no) +
                        ": pairs must be sorted and unique");
    }
    previous.emplace(i, j);
    fm.increment(i, j, c);
  }
  return fm;
}

void save_frequency(const std::filesystem::path& path, const FrequencyMatrix& fm) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_frequency(out, fm);
}

FrequencyMatrix load_frequency(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_frequency(in);
}

}  // namespace sasa::frequency
