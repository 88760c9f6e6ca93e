// SPDX-License-Identifier: Apache-2.0
#include "sasa/mask.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "sasa/error.hpp"
#include "text_format.hpp"

namespace sasa::mask {
namespace {

constexpr char kProvenanceLetters[4] = {'L', 'G', 'T', 'A'};

}  // namespace

std::string provenance_string(Provenance p) {
  std::string s(4, '-');
  for (int bit = 0; bit < 4; ++bit) {
    if (p & (1u << bit)) s[bit] = kProvenanceLetters[bit];
  }
  return s;
}

Provenance parse_provenance(std::string_view text) {
  if (text.size() != 4) throw FormatError("provenance must be 4 characters (LGTA)");
  Provenance p = 0;
  for (int bit = 0; bit < 4; ++bit) {
    if (text[bit] == kProvenanceLetters[bit]) {
      p |= static_cast<Provenance>(1u << bit);
    } else if (text[bit] != '-') {
      throw FormatError("bad provenance string '" + std::string(text) + "'");
    }
  }
  if (p == 0) throw FormatError("provenance '----' selects nothing");
  return p;
}

void AttentionConfig::validate() const {
  if (b < 1) throw InvalidArgument("AttentionConfig: block size b must be >= 1");
  if (n < 1) throw InvalidArgument("AttentionConfig: sequence length n must be >= 1");
  if (w < 1 || w % 2 == 0) throw InvalidArgument("AttentionConfig: window w must be odd and >= 1");
  const std::size_t nb = num_blocks();
  for (auto g : global_blocks) {
    if (g >= nb) {
      throw InvalidArgument("AttentionConfig: global block " + std::to_string(g) +
                            " >= number of blocks " + std::to_string(nb));
    }
  }
  if (heads < 1 || d_model % heads != 0) {
    throw InvalidArgument("AttentionConfig: d_model must be a positive multiple of heads");
  }
}

PairSet local_pattern(const AttentionConfig& cfg) {
  cfg.validate();
  const std::size_t nb = cfg.num_blocks();
  const std::size_t half = cfg.w / 2;
  PairSet out;
  for (std::size_t i = 0; i < nb; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(nb - 1, i + half);
    for (std::size_t j = lo; j <= hi; ++j) {
      out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  return out;
}

PairSet global_pattern(const AttentionConfig& cfg) {
  cfg.validate();
  const std::size_t nb = cfg.num_blocks();
  std::vector<bool> is_global(nb, false);
  for (auto g : cfg.global_blocks) is_global[g] = true;
  PairSet out;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (is_global[i] || is_global[j]) {
        out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  }
  return out;
}

PairSet topk_pattern(const ast::BlockScores& scores, std::size_t k) {
  const std::size_t nb = scores.num_blocks();
  PairSet out;
  std::vector<std::uint32_t> candidates;
  for (std::size_t i = 0; i < nb; ++i) {
    const auto row = scores.row(i);
    candidates.clear();
    for (std::size_t j = 0; j < nb; ++j) {
      if (row[j] > 0) candidates.push_back(static_cast<std::uint32_t>(j));
    }
    const std::size_t take = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
                        return row[a] != row[b] ? row[a] > row[b] : a < b;
                      });
    candidates.resize(take);
    std::sort(candidates.begin(), candidates.end());
    for (auto j : candidates) out.push_back({static_cast<std::uint32_t>(i), j});
  }
  return out;
}

BlockMask::BlockMask(std::size_t num_blocks) : rows_(num_blocks), provenance_(num_blocks) {}

BlockMask BlockMask::full(std::size_t num_blocks) {
  BlockMask m(num_blocks);
  for (std::size_t i = 0; i < num_blocks; ++i) {
    m.rows_[i].resize(num_blocks);
    std::iota(m.rows_[i].begin(), m.rows_[i].end(), 0u);
    m.provenance_[i].assign(num_blocks, kLocal);
  }
  return m;
}

void BlockMask::add(std::uint32_t query, std::uint32_t key, Provenance bits) {
  if (query >= num_blocks() || key >= num_blocks()) {
    throw InvalidArgument("BlockMask::add: block (" + std::to_string(query) + "," +
                          std::to_string(key) + ") out of range");
  }
  auto& row = rows_[query];
  auto& prov = provenance_[query];
  const auto it = std::lower_bound(row.begin(), row.end(), key);
  const auto offset = it - row.begin();
  if (it != row.end() && *it == key) {
    prov[static_cast<std::size_t>(offset)] |= bits;
  } else {
    row.insert(it, key);
    prov.insert(prov.begin() + offset, bits);
  }
}

void BlockMask::add_all(const PairSet& pairs, Provenance bits) {
  for (const auto& p : pairs) add(p.query, p.key, bits);
}

bool BlockMask::contains(std::uint32_t query, std::uint32_t key) const {
  return provenance(query, key) != 0;
}

Provenance BlockMask::provenance(std::uint32_t query, std::uint32_t key) const {
  if (query >= num_blocks()) return 0;
  const auto& row = rows_[query];
  const auto it = std::lower_bound(row.begin(), row.end(), key);
  if (it == row.end() || *it != key) return 0;
  return provenance_[query][static_cast<std::size_t>(it - row.begin())];
}

std::size_t BlockMask::selected_count() const noexcept {
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  return total;
}

PairSet BlockMask::pairs() const {
  PairSet out;
  out.reserve(selected_count());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (auto j : rows_[i]) out.push_back({static_cast<std::uint32_t>(i), j});
  }
  return out;
}

void BlockMask::validate() const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (row.empty()) throw InvalidArgument("BlockMask: row " + std::to_string(i) + " is empty");
    if (!std::is_sorted(row.begin(), row.end()) ||
        std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw InvalidArgument("BlockMask: row " + std::to_string(i) + " not sorted/unique");
    }
    if (row.back() >= rows_.size()) {
      throw InvalidArgument("BlockMask: row " + std::to_string(i) + " index out of range");
    }
    if (!std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(i))) {
      throw InvalidArgument("BlockMask: row " + std::to_string(i) + " lacks its diagonal");
    }
    if (std::find(provenance_[i].begin(), provenance_[i].end(), 0) != provenance_[i].end()) {
      throw InvalidArgument("BlockMask: row " + std::to_string(i) + " has empty provenance");
    }
  }
}

BlockMask build_mask(const AttentionConfig& cfg, const frequency::PairScoreMatrix& pair_scores,
                     const ast::TokenAdjacency& adjacency) {
  cfg.validate();
  if (pair_scores.n != cfg.n || adjacency.n != cfg.n) {
    throw InvalidArgument("build_mask: pair scores (n=" + std::to_string(pair_scores.n) +
                          ") and adjacency (n=" + std::to_string(adjacency.n) +
                          ") must match cfg.n=" + std::to_string(cfg.n));
  }
  BlockMask mask(cfg.num_blocks());
  mask.add_all(local_pattern(cfg), kLocal);
  mask.add_all(global_pattern(cfg), kGlobal);
  if (cfg.use_topk) {
    const auto coo = pair_scores.to_coo();
    mask.add_all(topk_pattern(ast::block_reduce_sum(coo, cfg.n, cfg.b), cfg.k), kTopK);
  }
  if (cfg.use_ast) {
    const auto coo = adjacency.to_coo();
    mask.add_all(topk_pattern(ast::block_reduce_sum(coo, cfg.n, cfg.b), cfg.ast_budget()), kAst);
  }
  return mask;
}

MaskHeader MaskHeader::from_config(const AttentionConfig& cfg) {
  return MaskHeader{cfg.n, cfg.b, cfg.w, cfg.global_blocks, cfg.k};
}

void write_mask(std::ostream& out, const MaskHeader& header, const BlockMask& mask) {
  out << "n=" << header.n << " b=" << header.b << " w=" << header.w << " g=";
  for (std::size_t i = 0; i < header.global_blocks.size(); ++i) {
    out << (i ? "," : "") << header.global_blocks[i];
  }
  out << " k=" << header.k << '\n';
  for (std::size_t i = 0; i < mask.num_blocks(); ++i) {
    const auto row = mask.row(i);
    const auto prov = mask.row_provenance(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << i << '\t' << row[c] << '\t' << provenance_string(prov[c]) << '\n';
    }
  }
}

MaskFile read_mask(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("mask file: missing header");
  const auto fields = detail::parse_header(line, {"n", "b", "w", "g", "k"}, "mask file");
  MaskFile file;
  file.header.n = detail::parse_number<std::size_t>(fields[0], "mask n");
  file.header.b = detail::parse_number<std::size_t>(fields[1], "mask b");
  file.header.w = detail::parse_number<std::size_t>(fields[2], "mask w");
  if (!fields[3].empty()) {
    for (const auto g : detail::split(fields[3], ',')) {
      file.header.global_blocks.push_back(detail::parse_number<std::uint32_t>(g, "mask g"));
    }
  }
  file.header.k = detail::parse_number<std::size_t>(fields[4], "mask k");
  if (file.header.b == 0) throw FormatError("mask file: b must be >= 1");

  file.mask = BlockMask(ceil_div(file.header.n, file.header.b));
  std::size_t line_no = 1;
  BlockPair previous{};
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = detail::split(line, '\t');
    if (parts.size() != 3) {
      throw FormatError("mask file line " + std::to_string(line_no) +
                        ": expected i<TAB>j<TAB>LGTA");
    }
    const BlockPair pair{detail::parse_number<std::uint32_t>(parts[0], "mask i"),
                         detail::parse_number<std::uint32_t>(parts[1], "mask j")};
    if (!first && !(previous < pair)) {
      throw FormatError("mask file line " + std::to_string(line_no) + ": pairs not sorted");
    }
    if (pair.query >= file.mask.num_blocks() || pair.key >= file.mask.num_blocks()) {
      throw FormatError("mask file line " + std::to_string(line_no) + ": block out of range");
    }
    file.mask.add(pair.query, pair.key, parse_provenance(parts[2]));
    previous = pair;
    first = false;
  }
  return file;
}

void save_mask(const std::filesystem::path& path, const MaskHeader& header,
               const BlockMask& mask) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_mask(out, header, mask);
}

MaskFile load_mask(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_mask(in);
}

}  // namespace sasa::mask
