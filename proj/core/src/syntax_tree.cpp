// SPDX-License-Identifier: Apache-2.0
#include "sasa/syntax_tree.hpp"

#include <algorithm>
#include <string>

#include "sasa/error.hpp"

namespace sasa::ast {

SyntaxTree::SyntaxTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

NodeId SyntaxTree::lowest_common_ancestor(NodeId a, NodeId b) const {
  while (nodes_[a].depth > nodes_[b].depth) a = nodes_[a].parent;
  while (nodes_[b].depth > nodes_[a].depth) b = nodes_[b].parent;
  while (a != b) {
    a = nodes_[a].parent;
    b = nodes_[b].parent;
  }
  return a;
}

std::uint32_t SyntaxTree::distance(NodeId a, NodeId b) const {
  const NodeId lca = lowest_common_ancestor(a, b);
  return nodes_[a].depth + nodes_[b].depth - 2 * nodes_[lca].depth;
}

std::optional<NodeId> SyntaxTree::deepest_covering(const ByteSpan& span) const {
  if (nodes_.empty() || !nodes_[0].range.contains(span)) return std::nullopt;
  NodeId current = 0;
  for (;;) {
    const auto& kids = nodes_[current].children;
    // First child whose end is past span.begin; siblings are ordered.
    auto it = std::partition_point(kids.begin(), kids.end(), [&](NodeId c) {
      return nodes_[c].range.end <= span.begin;
    });
    // Zero-width spans sit on a boundary; prefer the child that starts there.
    if (it == kids.end() || !nodes_[*it].range.contains(span)) return current;
    current = *it;
  }
}

std::vector<NodeId> SyntaxTree::find_all(std::string_view kind) const {
  std::vector<NodeId> found;
  std::vector<NodeId> stack = {root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (nodes_[id].kind == kind) found.push_back(id);
    const auto& kids = nodes_[id].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return found;
}

bool SyntaxTree::has_errors() const {
  return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_error(); });
}

namespace {

void sexp(const SyntaxTree& tree, NodeId id, std::string_view source, std::string& out) {
  const Node& n = tree.node(id);
  if (n.is_leaf()) {
    out += '(';
    out += n.kind;
    out += " \"";
    out += source.substr(n.range.begin, n.range.length());
    out += "\")";
    return;
  }
  out += '(';
  out += n.kind;
  for (NodeId c : n.children) {
    out += ' ';
    sexp(tree, c, source, out);
  }
  out += ')';
}

}  // namespace

std::string SyntaxTree::to_sexp(std::string_view source) const {
  std::string out;
  if (!nodes_.empty()) sexp(*this, root(), source, out);
  return out;
}

void validate(const SyntaxTree& tree) {
  const auto& nodes = tree.nodes();
  if (nodes.empty()) throw InvalidArgument("SyntaxTree: no root");
  if (nodes[0].parent != kNoParent || nodes[0].depth != 0) {
    throw InvalidArgument("SyntaxTree: malformed root");
  }
  for (NodeId id = 0; id < nodes.size(); ++id) {
    const Node& n = nodes[id];
    if (n.range.end < n.range.begin) {
      throw InvalidArgument("SyntaxTree: inverted range at node " + std::to_string(id));
    }
    std::size_t cursor = n.range.begin;
    for (NodeId c : n.children) {
      const Node& child = nodes.at(c);
      if (child.parent != id || child.depth != n.depth + 1) {
        throw InvalidArgument("SyntaxTree: broken parent link at node " + std::to_string(c));
      }
      if (!n.range.contains(child.range)) {
        throw InvalidArgument("SyntaxTree: node " + std::to_string(c) + " escapes its parent");
      }
      if (child.range.begin < cursor) {
        throw InvalidArgument("SyntaxTree: siblings overlap at node " + std::to_string(c));
      }
      cursor = child.range.end;
    }
  }
}

Language parse_language_id(std::string_view id) {
  if (id == "c") return Language::C;
  if (id == "java") return Language::Java;
  throw UnsupportedLanguage("unsupported language '" + std::string(id) +
                            "' (available: c, java)");
}

std::string_view language_name(Language lang) {
  return lang == Language::C ? "c" : "java";
}

SyntaxTree parse_to_tree(std::string_view source, std::string_view language_id) {
  return parse_to_tree(source, parse_language_id(language_id));
}

}  // namespace sasa::ast
