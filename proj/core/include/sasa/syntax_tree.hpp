// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sasa/tokenizer.hpp"

namespace sasa::ast {

using tokenizer::ByteSpan;
using NodeId = std::uint32_t;

inline constexpr NodeId kNoParent = static_cast<NodeId>(-1);

struct Node {
  /// Grammar symbol, e.g. "while_statement". Anonymous leaves (keywords,
  /// punctuation) use their own text as the kind.
  std::string kind;
  ByteSpan range;
  NodeId parent = kNoParent;
  std::vector<NodeId> children;
  std::uint32_t depth = 0;

  bool is_leaf() const noexcept { return children.empty(); }
  bool is_error() const noexcept { return kind == "ERROR"; }
};

/// Concrete syntax tree stored as a flat arena; node 0 is the root and
/// covers the whole source. Children are ordered by byte offset.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  explicit SyntaxTree(std::vector<Node> nodes);

  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  /// Edge count on the tree path between a and b.
  std::uint32_t distance(NodeId a, NodeId b) const;
  NodeId lowest_common_ancestor(NodeId a, NodeId b) const;

  /// Deepest node whose range contains `span`; nullopt if not even the root does.
  std::optional<NodeId> deepest_covering(const ByteSpan& span) const;

  /// All nodes of the given kind, in preorder.
  std::vector<NodeId> find_all(std::string_view kind) const;
  bool has_errors() const;

  /// S-expression of named nodes, for debugging and tests.
  std::string to_sexp(std::string_view source) const;

 private:
  std::vector<Node> nodes_;
};

/// Throws InvalidArgument if children escape their parent, siblings overlap
/// or are out of order, or depths/parents are inconsistent.
void validate(const SyntaxTree& tree);

enum class Language { C, Java };

/// "c" or "java"; anything else raises UnsupportedLanguage.
Language parse_language_id(std::string_view id);
std::string_view language_name(Language lang);

/// Error-tolerant recursive-descent parse of a C-family source file.
/// Unparseable regions become ERROR nodes instead of failing the parse.
SyntaxTree parse_to_tree(std::string_view source, Language lang);
SyntaxTree parse_to_tree(std::string_view source, std::string_view language_id);

}  // namespace sasa::ast
