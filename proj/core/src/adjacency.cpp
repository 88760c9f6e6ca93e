// SPDX-License-Identifier: Apache-2.0
#include "sasa/adjacency.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "sasa/error.hpp"
#include "text_format.hpp"

namespace sasa::ast {

TokenAlignment align_tokens(const SyntaxTree& tree, const tokenizer::TokenizedCode& toks) {
  TokenAlignment alignment(toks.size());
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks.is_special(i)) continue;
    const auto node = tree.deepest_covering(toks.spans[i]);
    if (!node) {
      throw AlignmentError(i, "align_tokens: token " + std::to_string(i) + " span [" +
                                  std::to_string(toks.spans[i].begin) + "," +
                                  std::to_string(toks.spans[i].end) +
                                  ") lies outside the parsed source");
    }
    alignment[i] = *node;
  }
  return alignment;
}

bool TokenAdjacency::contains(std::uint32_t i, std::uint32_t j) const {
  return std::binary_search(entries.begin(), entries.end(), TokenPair{i, j});
}

std::vector<CooEntry> TokenAdjacency::to_coo() const {
  std::vector<CooEntry> coo;
  coo.reserve(entries.size());
  for (const auto& [i, j] : entries) coo.push_back({i, j, 1});
  return coo;
}

TokenAdjacency build_token_adjacency(const SyntaxTree& tree, const tokenizer::TokenizedCode& toks,
                                     std::uint32_t max_distance) {
  if (max_distance < 1) throw InvalidArgument("build_token_adjacency: D must be >= 1");
  const TokenAlignment alignment = align_tokens(tree, toks);

  std::vector<std::vector<std::uint32_t>> tokens_at(tree.size());
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    if (alignment[i]) tokens_at[*alignment[i]].push_back(static_cast<std::uint32_t>(i));
  }

  TokenAdjacency adj;
  adj.n = toks.size();
  adj.max_distance = max_distance;

  // Bounded BFS over the undirected tree from each token's node.
  std::vector<std::uint32_t> seen_stamp(tree.size(), 0);
  std::uint32_t stamp = 0;
  std::vector<std::pair<NodeId, std::uint32_t>> frontier;
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    if (!alignment[i]) continue;
    ++stamp;
    frontier.assign(1, {*alignment[i], 0});
    seen_stamp[*alignment[i]] = stamp;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const auto [node, dist] = frontier[head];
      for (std::uint32_t j : tokens_at[node]) {
        adj.entries.emplace_back(static_cast<std::uint32_t>(i), j);
      }
      if (dist == max_distance) continue;
      const Node& n = tree.node(node);
      auto visit = [&](NodeId next) {
        if (seen_stamp[next] != stamp) {
          seen_stamp[next] = stamp;
          frontier.emplace_back(next, dist + 1);
        }
      };
      if (n.parent != kNoParent) visit(n.parent);
      for (NodeId c : n.children) visit(c);
    }
  }
  std::sort(adj.entries.begin(), adj.entries.end());
  return adj;
}

void validate(const TokenAdjacency& adj, const tokenizer::TokenizedCode* toks) {
  if (!std::is_sorted(adj.entries.begin(), adj.entries.end()) ||
      std::adjacent_find(adj.entries.begin(), adj.entries.end()) != adj.entries.end()) {
    throw InvalidArgument("TokenAdjacency: entries not sorted and unique");
  }
  for (const auto& [i, j] : adj.entries) {
    if (i >= adj.n || j >= adj.n) {
      throw InvalidArgument("TokenAdjacency: entry out of range");
    }
    if (!adj.contains(j, i)) {
      throw InvalidArgument("TokenAdjacency: (" + std::to_string(i) + "," + std::to_string(j) +
                            ") present without its mirror");
    }
    if (toks && (toks->is_special(i) || toks->is_special(j))) {
      throw InvalidArgument("TokenAdjacency: special token " +
                            std::to_string(toks->is_special(i) ? i : j) + " has an entry");
    }
  }
  if (toks) {
    if (toks->size() != adj.n) throw InvalidArgument("TokenAdjacency: n differs from tokens");
    for (std::uint32_t i = 0; i < adj.n; ++i) {
      if (!toks->is_special(i) && !adj.contains(i, i)) {
        throw InvalidArgument("TokenAdjacency: missing diagonal for token " + std::to_string(i));
      }
    }
  }
}

void write_adjacency(std::ostream& out, const TokenAdjacency& adj) {
  out << "n=" << adj.n << " D=" << adj.max_distance << '\n';
  for (const auto& [i, j] : adj.entries) {
    if (i <= j) out << i << '\t' << j << '\n';
  }
}

TokenAdjacency read_adjacency(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("adjacency file: missing header");
  const auto header = detail::parse_header(line, {"n", "D"}, "adjacency file");
  TokenAdjacency adj;
  adj.n = detail::parse_number<std::size_t>(header[0], "adjacency n");
  adj.max_distance = detail::parse_number<std::uint32_t>(header[1], "adjacency D");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2) {
      throw FormatError("adjacency file line " + std::to_string(line_no) + ": expected i<TAB>j");
    }
    const auto i = detail::parse_number<std::uint32_t>(fields[0], "adjacency i");
    const auto j = detail::parse_number<std::uint32_t>(fields[1], "adjacency j");
    if (i > j || j >= adj.n) {
      throw FormatError("adjacency file line " + std::to_string(line_no) +
                        ": need i <= j < n");
    }
    adj.entries.emplace_back(i, j);
    if (i != j) adj.entries.emplace_back(j, i);
  }
  std::sort(adj.entries.begin(), adj.entries.end());
  if (std::adjacent_find(adj.entries.begin(), adj.entries.end()) != adj.entries.end()) {
    throw FormatError("adjacency file: duplicate entry");
  }
  return adj;
}

void save_adjacency(const std::filesystem::path& path, const TokenAdjacency& adj) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_adjacency(out, adj);
}

TokenAdjacency load_adjacency(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_adjacency(in);
}

}  // namespace sasa::ast
