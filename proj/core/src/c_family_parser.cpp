// SPDX-License-Identifier: Apache-2.0
//
// Hand-written recursive-descent parser for a C/Java subset. The tree is
// concrete: every lexical token becomes a leaf, comments and preprocessor
// lines are attached as extras, and anything the grammar does not accept
// is wrapped in an ERROR node so the parse always succeeds.

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sasa/syntax_tree.hpp"

namespace sasa::ast {
namespace {

enum class LexKind { Identifier, Keyword, Number, String, Char, Operator, Comment, Preproc };

struct LexToken {
  LexKind kind;
  std::size_t begin;
  std::size_t end;
  std::string_view text;
};

const std::unordered_set<std::string_view>& keywords(Language lang) {
  static const std::unordered_set<std::string_view> kC = {
      "auto",   "break",    "case",     "char",   "const",    "continue", "default",
      "do",     "double",   "else",     "enum",   "extern",   "float",    "for",
      "goto",   "if",       "inline",   "int",    "long",     "register", "return",
      "short",  "signed",   "sizeof",   "static", "struct",   "switch",   "typedef",
      "union",  "unsigned", "void",     "volatile", "while",  "bool",     "_Bool",
      "true",   "false",    "NULL"};
  static const std::unordered_set<std::string_view> kJava = {
      "abstract", "assert",     "boolean",   "break",     "byte",      "case",
      "catch",    "char",       "class",     "const",     "continue",  "default",
      "do",       "double",     "else",      "enum",      "extends",   "final",
      "finally",  "float",      "for",       "goto",      "if",        "implements",
      "import",   "instanceof", "int",       "interface", "long",      "native",
      "new",      "package",    "private",   "protected", "public",    "return",
      "short",    "static",     "strictfp",  "super",     "switch",    "synchronized",
      "this",     "throw",      "throws",    "transient", "try",       "void",
      "volatile", "while",      "true",      "false",     "null"};
  return lang == Language::C ? kC : kJava;
}

bool is_primitive(std::string_view w) {
  static const std::unordered_set<std::string_view> kPrimitive = {
      "void",  "char",   "short",    "int",  "long",  "float", "double",
      "signed", "unsigned", "bool", "_Bool", "boolean", "byte"};
  return kPrimitive.contains(w);
}

bool is_modifier(std::string_view w) {
  static const std::unordered_set<std::string_view> kModifiers = {
      "public",   "private",  "protected", "static",    "final",  "abstract",
      "synchronized", "native", "transient", "volatile", "strictfp", "const",
      "extern",   "register", "inline",    "auto",      "typedef"};
  return kModifiers.contains(w);
}

bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}
bool ident_char(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view src, Language lang) : src_(src), keywords_(keywords(lang)) {}

  void run(std::vector<LexToken>& tokens, std::vector<LexToken>& extras) {
    bool line_start = true;
    while (pos_ < src_.size()) {
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        line_start = true;
        ++pos_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
        ++pos_;
        continue;
      }
      const std::size_t start = pos_;
      if (c == '#' && line_start) {
        skip_line_with_continuations();
        extras.push_back(make(LexKind::Preproc, start));
        continue;
      }
      line_start = false;
      if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        extras.push_back(make(LexKind::Comment, start));
      } else if (c == '/' && peek(1) == '*') {
        const auto close = src_.find("*/", pos_ + 2);
        pos_ = close == std::string_view::npos ? src_.size() : close + 2;
        extras.push_back(make(LexKind::Comment, start));
      } else if (ident_start(c)) {
        while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
        const auto text = src_.substr(start, pos_ - start);
        tokens.push_back(make(keywords_.contains(text) ? LexKind::Keyword : LexKind::Identifier,
                              start));
      } else if (digit(c) || (c == '.' && digit(peek(1)))) {
        lex_number();
        tokens.push_back(make(LexKind::Number, start));
      } else if (c == '"' || c == '\'') {
        lex_quoted(static_cast<char>(c));
        tokens.push_back(make(c == '"' ? LexKind::String : LexKind::Char, start));
      } else {
        pos_ += operator_length();
        tokens.push_back(make(LexKind::Operator, start));
      }
    }
  }

 private:
  unsigned char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? static_cast<unsigned char>(src_[pos_ + ahead]) : 0;
  }

  LexToken make(LexKind kind, std::size_t start) const {
    return {kind, start, pos_, src_.substr(start, pos_ - start)};
  }

  void skip_line_with_continuations() {
    while (pos_ < src_.size() && src_[pos_] != '\n') {
      if (src_[pos_] == '\\' && peek(1) == '\n') ++pos_;
      ++pos_;
    }
  }

  void lex_number() {
    while (pos_ < src_.size()) {
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (ident_char(c) || c == '.') {
        ++pos_;
      } else if ((c == '+' || c == '-') && pos_ > 0 &&
                 (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void lex_quoted(char quote) {
    ++pos_;
    while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
      ++pos_;
    }
    if (pos_ < src_.size() && src_[pos_] == quote) ++pos_;
  }

  std::size_t operator_length() const {
    static constexpr std::array<std::string_view, 25> kOps = {
        ">>>=", ">>>", "<<=", ">>=", "...", "->", "++", "--", "&&", "||", "==", "!=", "<=",
        ">=",   "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", ">>", "::"};
    const auto rest = src_.substr(pos_);
    for (const auto op : kOps) {
      if (rest.starts_with(op)) return op.size();
    }
    return 1;
  }

  std::string_view src_;
  const std::unordered_set<std::string_view>& keywords_;
  std::size_t pos_ = 0;
};

struct PNode {
  std::string kind;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<std::unique_ptr<PNode>> children;
};
using PNodePtr = std::unique_ptr<PNode>;

PNodePtr make_node(std::string kind) {
  auto n = std::make_unique<PNode>();
  n->kind = std::move(kind);
  return n;
}

void add(PNode& parent, PNodePtr child) {
  if (child) parent.children.push_back(std::move(child));
}

// Thrown to abandon the current statement; the caller rewinds and wraps the
// offending tokens in an ERROR node.
struct ParseFailure {};

enum class DeclContext { TopLevel, ClassBody, Block };

class Parser {
 public:
  Parser(Language lang, std::vector<LexToken> tokens) : lang_(lang), toks_(std::move(tokens)) {}

  PNodePtr parse_program() {
    auto program = make_node("program");
    while (!eof()) add(*program, guarded([this] { return top_level(); }));
    return program;
  }

 private:
  // ---- token access ----------------------------------------------------

  bool eof(std::size_t ahead = 0) const { return pos_ + ahead >= toks_.size(); }
  const LexToken* peek(std::size_t ahead = 0) const {
    return eof(ahead) ? nullptr : &toks_[pos_ + ahead];
  }
  bool at(std::string_view text, std::size_t ahead = 0) const {
    const LexToken* t = peek(ahead);
    return t && (t->kind == LexKind::Operator || t->kind == LexKind::Keyword) && t->text == text;
  }
  bool at_kind(LexKind kind, std::size_t ahead = 0) const {
    const LexToken* t = peek(ahead);
    return t && t->kind == kind;
  }
  bool at_index(std::size_t i, std::string_view text) const {
    return i < toks_.size() &&
           (toks_[i].kind == LexKind::Operator || toks_[i].kind == LexKind::Keyword) &&
           toks_[i].text == text;
  }
  bool kind_at_index(std::size_t i, LexKind kind) const {
    return i < toks_.size() && toks_[i].kind == kind;
  }

  static std::string leaf_kind(const LexToken& t) {
    switch (t.kind) {
      case LexKind::Identifier: return "identifier";
      case LexKind::Number: return "number_literal";
      case LexKind::String: return "string_literal";
      case LexKind::Char: return "character_literal";
      case LexKind::Comment: return "comment";
      case LexKind::Preproc: return "preproc_directive";
      case LexKind::Keyword:
        if (is_primitive(t.text)) return "primitive_type";
        if (t.text == "true" || t.text == "false") return "boolean_literal";
        if (t.text == "null" || t.text == "NULL") return "null_literal";
        return std::string(t.text);
      case LexKind::Operator: return std::string(t.text);
    }
    return "unknown";
  }

  static PNodePtr leaf_from(const LexToken& t, std::string kind) {
    auto n = make_node(std::move(kind));
    n->begin = t.begin;
    n->end = t.end;
    return n;
  }

  PNodePtr leaf() {
    if (eof()) throw ParseFailure{};
    const LexToken& t = toks_[pos_++];
    return leaf_from(t, leaf_kind(t));
  }

  PNodePtr leaf_as(std::string kind) {
    if (eof()) throw ParseFailure{};
    return leaf_from(toks_[pos_++], std::move(kind));
  }

  PNodePtr expect(std::string_view text) {
    if (!at(text)) throw ParseFailure{};
    return leaf();
  }

  PNodePtr expect_identifier(std::string kind = "identifier") {
    if (!at_kind(LexKind::Identifier)) throw ParseFailure{};
    return leaf_as(std::move(kind));
  }

  // `>>` and `>>>` close nested type argument lists one `>` at a time.
  void split_angle() {
    LexToken& t = toks_[pos_];
    if (t.kind != LexKind::Operator || t.text.size() < 2 || t.text.front() != '>') return;
    if (t.text != ">>" && t.text != ">>>" && t.text != ">=" && t.text != ">>=") return;
    LexToken rest = {LexKind::Operator, t.begin + 1, t.end, t.text.substr(1)};
    t.end = t.begin + 1;
    t.text = t.text.substr(0, 1);
    toks_.insert(toks_.begin() + static_cast<std::ptrdiff_t>(pos_) + 1, rest);
  }

  template <typename F>
  PNodePtr guarded(F&& parse) {
    const std::size_t start = pos_;
    try {
      return parse();
    } catch (const ParseFailure&) {
      pos_ = start;
      return error_node();
    }
  }

  PNodePtr error_node() {
    auto err = make_node("ERROR");
    int depth = 0;
    if (at("}")) {
      add(*err, leaf());
      return err;
    }
    while (!eof()) {
      if (depth == 0 && at("}")) break;
      const bool semi = at(";");
      const bool open = at("(") || at("[") || at("{");
      const bool close = at(")") || at("]") || at("}");
      const bool brace_close = at("}");
      add(*err, leaf());
      if (open) ++depth;
      if (close && depth > 0) --depth;
      if (depth == 0 && (semi || brace_close)) break;
    }
    return err;
  }

  // ---- lookahead -------------------------------------------------------

  std::size_t skip_balanced(std::size_t i, std::string_view open, std::string_view close) const {
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      if (at_index(i, open)) ++depth;
      if (at_index(i, close) && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
  }

  std::size_t skip_annotation(std::size_t i) const {
    ++i;  // '@'
    if (!kind_at_index(i, LexKind::Identifier)) return std::string_view::npos;
    ++i;
    while (at_index(i, ".") && kind_at_index(i + 1, LexKind::Identifier)) i += 2;
    if (at_index(i, "(")) i = skip_balanced(i, "(", ")");
    return i;
  }

  std::size_t skip_modifiers(std::size_t i, bool& any) const {
    for (;;) {
      if (i < toks_.size() && toks_[i].kind == LexKind::Keyword && is_modifier(toks_[i].text)) {
        ++i;
        any = true;
      } else if (at_index(i, "@") && !at_index(i + 1, "interface")) {
        i = skip_annotation(i);
        if (i == std::string_view::npos) return i;
        any = true;
      } else {
        return i;
      }
    }
  }

  std::size_t scan_type_arguments(std::size_t i) const {
    // i at '<'; only type-ish tokens may appear inside.
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      const LexToken& t = toks_[i];
      if (t.kind == LexKind::Identifier) continue;
      if (t.kind == LexKind::Keyword &&
          (is_primitive(t.text) || t.text == "extends" || t.text == "super")) {
        continue;
      }
      if (t.kind != LexKind::Operator) return std::string_view::npos;
      if (t.text == "<") {
        ++depth;
      } else if (t.text == ">" || t.text == ">>" || t.text == ">>>") {
        depth -= static_cast<int>(t.text.size());
        if (depth <= 0) return depth == 0 ? i + 1 : std::string_view::npos;
      } else if (t.text != "," && t.text != "." && t.text != "?" && t.text != "[" &&
                 t.text != "]") {
        return std::string_view::npos;
      }
    }
    return std::string_view::npos;
  }

  // End index of a type starting at i, or npos.
  std::size_t scan_type(std::size_t i) const {
    if (i >= toks_.size()) return std::string_view::npos;
    const LexToken& t = toks_[i];
    if (t.kind == LexKind::Keyword && is_primitive(t.text)) {
      while (i < toks_.size() && toks_[i].kind == LexKind::Keyword && is_primitive(toks_[i].text))
        ++i;
    } else if (t.kind == LexKind::Identifier) {
      ++i;
      while (at_index(i, ".") && kind_at_index(i + 1, LexKind::Identifier)) i += 2;
      if (at_index(i, "<")) {
        i = scan_type_arguments(i);
        if (i == std::string_view::npos) return i;
      }
    } else {
      return std::string_view::npos;
    }
    while (at_index(i, "[") && at_index(i + 1, "]")) i += 2;
    return i;
  }

  // Like scan_type, but also accepts C tag types and trailing pointers, as
  // written inside casts and sizeof.
  std::size_t scan_type_name(std::size_t i) const {
    std::size_t end;
    if (lang_ == Language::C && (at_index(i, "struct") || at_index(i, "union") ||
                                 at_index(i, "enum"))) {
      if (!kind_at_index(i + 1, LexKind::Identifier)) return std::string_view::npos;
      end = i + 2;
    } else {
      end = scan_type(i);
      if (end == std::string_view::npos) return end;
    }
    while (lang_ == Language::C && at_index(end, "*")) ++end;
    return end;
  }

  bool class_like_ahead() const {
    if (lang_ != Language::Java) return false;
    bool any = false;
    const std::size_t i = skip_modifiers(pos_, any);
    return at_index(i, "class") || at_index(i, "interface") || at_index(i, "enum") ||
           (at_index(i, "@") && at_index(i + 1, "interface"));
  }

  bool looks_like_declaration() const {
    bool any_modifier = false;
    std::size_t i = skip_modifiers(pos_, any_modifier);
    if (i == std::string_view::npos) return false;
    if (lang_ == Language::C && (at_index(i, "struct") || at_index(i, "union") ||
                                 at_index(i, "enum"))) {
      return true;
    }
    const bool simple_ident = kind_at_index(i, LexKind::Identifier);
    const std::size_t after_type = scan_type(i);
    if (after_type == std::string_view::npos) return false;
    std::size_t j = after_type;
    if (lang_ == Language::C) {
      while (at_index(j, "*")) ++j;
    }
    if (kind_at_index(j, LexKind::Identifier)) return true;
    // Java constructor: modifiers Name(
    return lang_ == Language::Java && any_modifier && simple_ident && after_type == i + 1 &&
           at_index(after_type, "(");
  }

  // ---- declarations ----------------------------------------------------

  PNodePtr top_level() {
    if (at("package") || at("import")) return simple_until_semicolon(
        at("package") ? "package_declaration" : "import_declaration");
    if (class_like_ahead()) return class_declaration();
    if (looks_like_declaration()) return declaration(DeclContext::TopLevel);
    return statement();
  }

  PNodePtr simple_until_semicolon(std::string kind) {
    auto n = make_node(std::move(kind));
    while (!eof() && !at(";")) add(*n, leaf());
    add(*n, expect(";"));
    return n;
  }

  PNodePtr annotation() {
    auto n = make_node("annotation");
    add(*n, expect("@"));
    add(*n, expect_identifier());
    while (at(".") && at_kind(LexKind::Identifier, 1)) {
      add(*n, leaf());
      add(*n, leaf());
    }
    if (at("(")) add(*n, argument_list());
    return n;
  }

  PNodePtr modifiers() {
    auto mods = make_node("modifiers");
    for (;;) {
      if (at_kind(LexKind::Keyword) && is_modifier(peek()->text)) {
        add(*mods, leaf());
      } else if (at("@") && !at("interface", 1)) {
        add(*mods, annotation());
      } else {
        break;
      }
    }
    return mods->children.empty() ? nullptr : std::move(mods);
  }

  PNodePtr type_arguments() {
    auto n = make_node("type_arguments");
    add(*n, expect("<"));
    while (!eof()) {
      split_angle();
      if (at(">")) break;
      if (at("?")) {
        auto wildcard = make_node("wildcard");
        add(*wildcard, leaf());
        if (at("extends") || at("super")) {
          add(*wildcard, leaf());
          add(*wildcard, type());
        }
        add(*n, std::move(wildcard));
      } else {
        add(*n, type());
      }
      split_angle();
      if (at(",")) {
        add(*n, leaf());
      } else {
        break;
      }
    }
    split_angle();
    add(*n, expect(">"));
    return n;
  }

  PNodePtr struct_specifier() {
    const bool is_enum = at("enum");
    auto n = make_node(is_enum ? "enum_specifier" : (at("union") ? "union_specifier"
                                                                 : "struct_specifier"));
    add(*n, leaf());
    if (at_kind(LexKind::Identifier)) add(*n, leaf_as("type_identifier"));
    if (at("{")) {
      auto body = make_node(is_enum ? "enumerator_list" : "field_declaration_list");
      add(*body, leaf());
      while (!eof() && !at("}")) {
        if (is_enum) {
          add(*body, guarded([this] { return enumerator(); }));
        } else {
          add(*body, guarded([this] { return declaration(DeclContext::ClassBody); }));
        }
      }
      add(*body, expect("}"));
      add(*n, std::move(body));
    }
    return n;
  }

  PNodePtr enumerator() {
    auto n = make_node("enumerator");
    add(*n, expect_identifier());
    if (at("=")) {
      add(*n, leaf());
      add(*n, ternary());
    }
    if (at(",")) add(*n, leaf());
    else if (!at("}")) throw ParseFailure{};
    return n;
  }

  PNodePtr type() {
    if (lang_ == Language::C && (at("struct") || at("union") || at("enum"))) {
      return struct_specifier();
    }
    PNodePtr base;
    if (at_kind(LexKind::Keyword) && is_primitive(peek()->text)) {
      if (at_kind(LexKind::Keyword, 1) && is_primitive(peek(1)->text)) {
        base = make_node("sized_type_specifier");
        while (at_kind(LexKind::Keyword) && is_primitive(peek()->text)) add(*base, leaf());
      } else {
        base = leaf();
      }
    } else if (at_kind(LexKind::Identifier)) {
      base = leaf_as("type_identifier");
      while (at(".") && at_kind(LexKind::Identifier, 1)) {
        auto scoped = make_node("scoped_type_identifier");
        add(*scoped, std::move(base));
        add(*scoped, leaf());
        add(*scoped, leaf_as("type_identifier"));
        base = std::move(scoped);
      }
      if (at("<")) {
        auto generic = make_node("generic_type");
        add(*generic, std::move(base));
        add(*generic, type_arguments());
        base = std::move(generic);
      }
    } else {
      throw ParseFailure{};
    }
    if (at("[") && at("]", 1)) {
      auto array = make_node("array_type");
      add(*array, std::move(base));
      add(*array, dimensions());
      base = std::move(array);
    }
    return base;
  }

  PNodePtr dimensions() {
    auto dims = make_node("dimensions");
    while (at("[") && at("]", 1)) {
      add(*dims, leaf());
      add(*dims, leaf());
    }
    return dims;
  }

  PNodePtr formal_parameters() {
    auto params = make_node("formal_parameters");
    add(*params, expect("("));
    while (!eof() && !at(")")) {
      auto param = make_node(at("...") ? "variadic_parameter" : "formal_parameter");
      add(*param, modifiers());
      if (at("...")) {
        add(*param, leaf());
      } else {
        add(*param, type());
        while (at("*") || at("&")) add(*param, leaf());
        if (at("...")) add(*param, leaf());
        if (at_kind(LexKind::Identifier)) add(*param, leaf());
        if (at("[")) {
          while (at("[")) {
            add(*param, leaf());
            if (!at("]")) add(*param, expression());
            add(*param, expect("]"));
          }
        }
      }
      add(*params, std::move(param));
      if (at(",")) add(*params, leaf());
      else break;
    }
    add(*params, expect(")"));
    return params;
  }

  PNodePtr throws_clause() {
    auto n = make_node("throws");
    add(*n, leaf());
    add(*n, type());
    while (at(",")) {
      add(*n, leaf());
      add(*n, type());
    }
    return n;
  }

  PNodePtr variable_initializer() { return at("{") ? initializer_list() : expression(); }

  PNodePtr initializer_list() {
    auto n = make_node(lang_ == Language::Java ? "array_initializer" : "initializer_list");
    add(*n, expect("{"));
    while (!eof() && !at("}")) {
      add(*n, variable_initializer());
      if (at(",")) add(*n, leaf());
      else break;
    }
    add(*n, expect("}"));
    return n;
  }

  // Declarator after its name (and pointers) have been consumed into `decl`.
  void declarator_tail(PNode& decl) {
    while (at("[")) {
      add(decl, leaf());
      if (!at("]")) add(decl, expression());
      add(decl, expect("]"));
    }
    if (at("=")) {
      add(decl, leaf());
      add(decl, variable_initializer());
    }
  }

  PNodePtr declaration(DeclContext ctx) {
    auto decl = make_node("");
    add(*decl, modifiers());

    // Java constructor: modifiers Name (
    if (lang_ == Language::Java && at_kind(LexKind::Identifier) && at("(", 1)) {
      decl->kind = "constructor_declaration";
      add(*decl, leaf());
      add(*decl, formal_parameters());
      if (at("throws")) add(*decl, throws_clause());
      add(*decl, block());
      return decl;
    }

    add(*decl, type());
    if (at(";")) {
      // C: struct/enum definition without declarators.
      decl->kind = "declaration";
      add(*decl, leaf());
      return decl;
    }

    auto first = make_node("variable_declarator");
    while (lang_ == Language::C && at("*")) add(*first, leaf());
    add(*first, expect_identifier());

    if (at("(")) {
      decl->kind = lang_ == Language::Java ? "method_declaration" : "function_definition";
      for (auto& c : first->children) add(*decl, std::move(c));
      add(*decl, formal_parameters());
      if (at("[") && at("]", 1)) add(*decl, dimensions());
      if (at("throws")) add(*decl, throws_clause());
      if (at(";")) {
        if (lang_ == Language::C) decl->kind = "function_declaration";
        add(*decl, leaf());
      } else {
        add(*decl, block());
      }
      return decl;
    }

    switch (ctx) {
      case DeclContext::TopLevel:
        decl->kind = lang_ == Language::Java ? "field_declaration" : "declaration";
        break;
      case DeclContext::ClassBody: decl->kind = "field_declaration"; break;
      case DeclContext::Block: decl->kind = "local_variable_declaration"; break;
    }
    declarator_tail(*first);
    add(*decl, std::move(first));
    while (at(",")) {
      add(*decl, leaf());
      auto next = make_node("variable_declarator");
      while (lang_ == Language::C && at("*")) add(*next, leaf());
      add(*next, expect_identifier());
      declarator_tail(*next);
      add(*decl, std::move(next));
    }
    add(*decl, expect(";"));
    return decl;
  }

  PNodePtr class_declaration() {
    auto decl = make_node("class_declaration");
    add(*decl, modifiers());
    bool is_enum = false;
    if (at("interface")) {
      decl->kind = "interface_declaration";
    } else if (at("enum")) {
      decl->kind = "enum_declaration";
      is_enum = true;
    } else if (at("@")) {
      decl->kind = "annotation_type_declaration";
      add(*decl, leaf());
    } else if (!at("class")) {
      throw ParseFailure{};
    }
    add(*decl, leaf());
    add(*decl, expect_identifier());
    if (at("<")) {
      auto params = make_node("type_parameters");
      const std::size_t end = scan_type_arguments(pos_);
      if (end == std::string_view::npos) throw ParseFailure{};
      while (pos_ < end) add(*params, leaf());
      add(*decl, std::move(params));
    }
    if (at("extends")) {
      auto sup = make_node(decl->kind == "interface_declaration" ? "extends_interfaces"
                                                                 : "superclass");
      add(*sup, leaf());
      add(*sup, type());
      while (at(",")) {
        add(*sup, leaf());
        add(*sup, type());
      }
      add(*decl, std::move(sup));
    }
    if (at("implements")) {
      auto sup = make_node("super_interfaces");
      add(*sup, leaf());
      add(*sup, type());
      while (at(",")) {
        add(*sup, leaf());
        add(*sup, type());
      }
      add(*decl, std::move(sup));
    }
    add(*decl, is_enum ? enum_body() : class_body());
    return decl;
  }

  PNodePtr class_member() {
    if (at(";")) return leaf();
    if (class_like_ahead()) return class_declaration();
    if (at("{") || (at("static") && at("{", 1))) {
      auto init = make_node(at("static") ? "static_initializer" : "instance_initializer");
      if (at("static")) add(*init, leaf());
      add(*init, block());
      return init;
    }
    if (looks_like_declaration()) return declaration(DeclContext::ClassBody);
    throw ParseFailure{};
  }

  PNodePtr class_body() {
    auto body = make_node("class_body");
    add(*body, expect("{"));
    while (!eof() && !at("}")) add(*body, guarded([this] { return class_member(); }));
    add(*body, expect("}"));
    return body;
  }

  PNodePtr enum_body() {
    auto body = make_node("enum_body");
    add(*body, expect("{"));
    while (at_kind(LexKind::Identifier) || at("@")) {
      auto constant = make_node("enum_constant");
      add(*constant, modifiers());
      add(*constant, expect_identifier());
      if (at("(")) add(*constant, argument_list());
      if (at("{")) add(*constant, class_body());
      add(*body, std::move(constant));
      if (at(",")) add(*body, leaf());
      else break;
    }
    if (at(";")) {
      add(*body, leaf());
      while (!eof() && !at("}")) add(*body, guarded([this] { return class_member(); }));
    }
    add(*body, expect("}"));
    return body;
  }

  // ---- statements ------------------------------------------------------

  PNodePtr block() {
    auto b = make_node("block");
    add(*b, expect("{"));
    while (!eof() && !at("}")) add(*b, guarded([this] { return statement(); }));
    if (at("}")) add(*b, leaf());
    return b;
  }

  PNodePtr body_statement() {
    return guarded([this] { return statement(); });
  }

  PNodePtr parenthesized() {
    auto n = make_node("parenthesized_expression");
    add(*n, expect("("));
    add(*n, expression());
    add(*n, expect(")"));
    return n;
  }

  PNodePtr statement() {
    if (eof()) throw ParseFailure{};
    if (at("{")) return block();
    if (at(";")) {
      auto n = make_node("empty_statement");
      add(*n, leaf());
      return n;
    }
    if (at("if")) {
      auto n = make_node("if_statement");
      add(*n, leaf());
      add(*n, parenthesized());
      add(*n, body_statement());
      if (at("else")) {
        add(*n, leaf());
        add(*n, body_statement());
      }
      return n;
    }
    if (at("while")) {
      auto n = make_node("while_statement");
      add(*n, leaf());
      add(*n, parenthesized());
      add(*n, body_statement());
      return n;
    }
    if (at("do")) {
      auto n = make_node("do_statement");
      add(*n, leaf());
      add(*n, body_statement());
      add(*n, expect("while"));
      add(*n, parenthesized());
      add(*n, expect(";"));
      return n;
    }
    if (at("for")) return for_statement();
    if (at("switch")) return switch_statement();
    if (at("return")) {
      auto n = make_node("return_statement");
      add(*n, leaf());
      if (!at(";")) add(*n, expression());
      add(*n, expect(";"));
      return n;
    }
    if (at("break") || at("continue")) {
      auto n = make_node(at("break") ? "break_statement" : "continue_statement");
      add(*n, leaf());
      if (at_kind(LexKind::Identifier)) add(*n, leaf());
      add(*n, expect(";"));
      return n;
    }
    if (at("goto")) {
      auto n = make_node("goto_statement");
      add(*n, leaf());
      add(*n, expect_identifier());
      add(*n, expect(";"));
      return n;
    }
    if (at("throw")) {
      auto n = make_node("throw_statement");
      add(*n, leaf());
      add(*n, expression());
      add(*n, expect(";"));
      return n;
    }
    if (at("assert")) {
      auto n = make_node("assert_statement");
      add(*n, leaf());
      add(*n, expression());
      if (at(":")) {
        add(*n, leaf());
        add(*n, expression());
      }
      add(*n, expect(";"));
      return n;
    }
    if (at("try")) return try_statement();
    if (at("synchronized") && at("(", 1)) {
      auto n = make_node("synchronized_statement");
      add(*n, leaf());
      add(*n, parenthesized());
      add(*n, block());
      return n;
    }
    if (at_kind(LexKind::Identifier) && at(":", 1)) {
      auto n = make_node("labeled_statement");
      add(*n, leaf());
      add(*n, leaf());
      add(*n, body_statement());
      return n;
    }
    if (class_like_ahead()) return class_declaration();
    if (looks_like_declaration()) return declaration(DeclContext::Block);
    auto n = make_node("expression_statement");
    add(*n, expression());
    add(*n, expect(";"));
    return n;
  }

  PNodePtr for_statement() {
    auto n = make_node("for_statement");
    add(*n, leaf());
    add(*n, expect("("));

    if (looks_like_declaration()) {
      const std::size_t save = pos_;
      // Enhanced for: [modifiers] Type name ':' expr
      try {
        auto mods = modifiers();
        auto ty = type();
        auto name = expect_identifier();
        if (at(":")) {
          n->kind = "enhanced_for_statement";
          add(*n, std::move(mods));
          add(*n, std::move(ty));
          add(*n, std::move(name));
          add(*n, leaf());
          add(*n, expression());
          add(*n, expect(")"));
          add(*n, body_statement());
          return n;
        }
      } catch (const ParseFailure&) {
      }
      pos_ = save;
      add(*n, declaration(DeclContext::Block));
    } else {
      while (!at(";")) {
        add(*n, expression());
        if (at(",")) add(*n, leaf());
        else break;
      }
      add(*n, expect(";"));
    }
    if (!at(";")) add(*n, expression());
    add(*n, expect(";"));
    while (!at(")")) {
      add(*n, expression());
      if (at(",")) add(*n, leaf());
      else break;
    }
    add(*n, expect(")"));
    add(*n, body_statement());
    return n;
  }

  PNodePtr switch_label() {
    auto label = make_node("switch_label");
    if (at("case")) {
      add(*label, leaf());
      add(*label, ternary());
      while (at(",")) {
        add(*label, leaf());
        add(*label, ternary());
      }
    } else {
      add(*label, expect("default"));
    }
    if (at(":") || at("->")) add(*label, leaf());
    else throw ParseFailure{};
    return label;
  }

  PNodePtr switch_statement() {
    auto n = make_node("switch_statement");
    add(*n, leaf());
    add(*n, parenthesized());
    auto body = make_node("switch_block");
    add(*body, expect("{"));
    while (!eof() && !at("}")) {
      if (!at("case") && !at("default")) {
        add(*body, error_node());
        continue;
      }
      auto group = make_node("switch_block_statement_group");
      while (at("case") || at("default")) {
        add(*group, guarded([this] { return switch_label(); }));
      }
      while (!eof() && !at("}") && !at("case") && !at("default")) {
        add(*group, guarded([this] { return statement(); }));
      }
      add(*body, std::move(group));
    }
    add(*body, expect("}"));
    add(*n, std::move(body));
    return n;
  }

  PNodePtr try_statement() {
    auto n = make_node("try_statement");
    add(*n, leaf());
    if (at("(")) {
      auto res = make_node("resource_specification");
      const std::size_t end = skip_balanced(pos_, "(", ")");
      if (end == std::string_view::npos) throw ParseFailure{};
      while (pos_ < end) add(*res, leaf());
      add(*n, std::move(res));
    }
    add(*n, block());
    while (at("catch")) {
      auto clause = make_node("catch_clause");
      add(*clause, leaf());
      add(*clause, expect("("));
      auto param = make_node("catch_formal_parameter");
      add(*param, modifiers());
      add(*param, type());
      while (at("|")) {
        add(*param, leaf());
        add(*param, type());
      }
      add(*param, expect_identifier());
      add(*clause, std::move(param));
      add(*clause, expect(")"));
      add(*clause, block());
      add(*n, std::move(clause));
    }
    if (at("finally")) {
      auto clause = make_node("finally_clause");
      add(*clause, leaf());
      add(*clause, block());
      add(*n, std::move(clause));
    }
    return n;
  }

  // ---- expressions -----------------------------------------------------

  static bool is_assignment_op(std::string_view op) {
    return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" ||
           op == "&=" || op == "|=" || op == "^=" || op == "<<=" || op == ">>=" || op == ">>>=";
  }

  static int binary_precedence(const LexToken& t) {
    if (t.kind == LexKind::Keyword) return t.text == "instanceof" ? 7 : -1;
    if (t.kind != LexKind::Operator) return -1;
    const auto op = t.text;
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return -1;
  }

  PNodePtr expression() {
    auto lhs = ternary();
    if (at_kind(LexKind::Operator) && is_assignment_op(peek()->text)) {
      auto n = make_node("assignment_expression");
      add(*n, std::move(lhs));
      add(*n, leaf());
      add(*n, at("{") ? initializer_list() : expression());
      return n;
    }
    return lhs;
  }

  PNodePtr ternary() {
    auto cond = binary(1);
    if (!at("?")) return cond;
    auto n = make_node("ternary_expression");
    add(*n, std::move(cond));
    add(*n, leaf());
    add(*n, expression());
    add(*n, expect(":"));
    add(*n, ternary());
    return n;
  }

  PNodePtr binary(int min_prec) {
    auto lhs = unary();
    for (;;) {
      const LexToken* t = peek();
      if (!t) break;
      const int prec = binary_precedence(*t);
      if (prec < min_prec) break;
      if (t->text == "instanceof") {
        auto n = make_node("instanceof_expression");
        add(*n, std::move(lhs));
        add(*n, leaf());
        add(*n, type());
        if (at_kind(LexKind::Identifier)) add(*n, leaf());
        lhs = std::move(n);
        continue;
      }
      auto n = make_node("binary_expression");
      add(*n, std::move(lhs));
      add(*n, leaf());
      add(*n, binary(prec + 1));
      lhs = std::move(n);
    }
    return lhs;
  }

  bool cast_ahead() const {
    if (!at("(")) return false;
    const std::size_t i = pos_ + 1;
    if (i < toks_.size() && toks_[i].kind == LexKind::Keyword &&
        (is_primitive(toks_[i].text) || toks_[i].text == "struct" || toks_[i].text == "union" ||
         toks_[i].text == "enum")) {
      std::size_t end = scan_type_name(i);
      while (at_index(end, "*")) ++end;
      return end != std::string_view::npos && at_index(end, ")");
    }
    if (!kind_at_index(i, LexKind::Identifier)) return false;
    const std::size_t end = scan_type_name(i);
    if (end == std::string_view::npos || !at_index(end, ")")) return false;
    const std::size_t next = end + 1;
    if (next >= toks_.size()) return false;
    const LexToken& t = toks_[next];
    switch (t.kind) {
      case LexKind::Identifier:
      case LexKind::Number:
      case LexKind::String:
      case LexKind::Char: return true;
      case LexKind::Keyword:
        return t.text == "this" || t.text == "new" || t.text == "true" || t.text == "false" ||
               t.text == "null" || t.text == "super";
      case LexKind::Operator: return t.text == "!" || t.text == "~" || t.text == "(";
      default: return false;
    }
  }

  PNodePtr unary() {
    if (at("!") || at("~") || at("-") || at("+") || (lang_ == Language::C && (at("*") || at("&")))) {
      auto n = make_node("unary_expression");
      add(*n, leaf());
      add(*n, unary());
      return n;
    }
    if (at("++") || at("--")) {
      auto n = make_node("update_expression");
      add(*n, leaf());
      add(*n, unary());
      return n;
    }
    if (at("sizeof")) {
      auto n = make_node("sizeof_expression");
      add(*n, leaf());
      const std::size_t type_end = at("(") ? scan_type_name(pos_ + 1) : std::string_view::npos;
      if (type_end != std::string_view::npos && at_index(type_end, ")")) {
        const std::size_t save = pos_;
        try {
          add(*n, leaf());
          add(*n, type());
          while (at("*")) add(*n, leaf());
          add(*n, expect(")"));
          return n;
        } catch (const ParseFailure&) {
          pos_ = save;
          n->children.resize(1);
        }
      }
      add(*n, unary());
      return n;
    }
    if (cast_ahead()) {
      auto n = make_node("cast_expression");
      add(*n, leaf());
      add(*n, type());
      while (at("*")) add(*n, leaf());
      add(*n, expect(")"));
      add(*n, unary());
      return n;
    }
    return postfix(primary());
  }

  PNodePtr argument_list() {
    auto args = make_node("argument_list");
    add(*args, expect("("));
    while (!eof() && !at(")")) {
      add(*args, expression());
      if (at(",")) add(*args, leaf());
      else break;
    }
    add(*args, expect(")"));
    return args;
  }

  PNodePtr postfix(PNodePtr expr) {
    for (;;) {
      if (at("(")) {
        auto n = make_node(lang_ == Language::Java ? "method_invocation" : "call_expression");
        add(*n, std::move(expr));
        add(*n, argument_list());
        expr = std::move(n);
      } else if (at("[")) {
        auto n = make_node(lang_ == Language::Java ? "array_access" : "subscript_expression");
        add(*n, std::move(expr));
        add(*n, leaf());
        add(*n, expression());
        add(*n, expect("]"));
        expr = std::move(n);
      } else if (at(".") || at("->")) {
        auto n = make_node(at(".") && lang_ == Language::Java ? "field_access"
                                                              : "field_expression");
        add(*n, std::move(expr));
        add(*n, leaf());
        if (at_kind(LexKind::Identifier)) {
          add(*n, leaf());
        } else if (at("this") || at("class") || at("new") || at("super")) {
          add(*n, leaf());
        } else {
          throw ParseFailure{};
        }
        expr = std::move(n);
      } else if (at("++") || at("--")) {
        auto n = make_node("update_expression");
        add(*n, std::move(expr));
        add(*n, leaf());
        expr = std::move(n);
      } else {
        return expr;
      }
    }
  }

  PNodePtr creation() {
    auto n = make_node("object_creation_expression");
    add(*n, leaf());  // new
    PNodePtr base;
    if (at_kind(LexKind::Keyword) && is_primitive(peek()->text)) {
      base = leaf();
    } else {
      base = leaf_as("type_identifier");
      if (base->kind != "type_identifier") throw ParseFailure{};
      while (at(".") && at_kind(LexKind::Identifier, 1)) {
        auto scoped = make_node("scoped_type_identifier");
        add(*scoped, std::move(base));
        add(*scoped, leaf());
        add(*scoped, leaf_as("type_identifier"));
        base = std::move(scoped);
      }
      if (at("<")) {
        auto generic = make_node("generic_type");
        add(*generic, std::move(base));
        add(*generic, type_arguments());
        base = std::move(generic);
      }
    }
    add(*n, std::move(base));
    if (at("(")) {
      add(*n, argument_list());
      if (at("{")) add(*n, class_body());
      return n;
    }
    if (!at("[")) throw ParseFailure{};
    n->kind = "array_creation_expression";
    auto dims = make_node("dimensions_expr");
    while (at("[")) {
      add(*dims, leaf());
      if (!at("]")) add(*dims, expression());
      add(*dims, expect("]"));
    }
    add(*n, std::move(dims));
    if (at("{")) add(*n, initializer_list());
    return n;
  }

  PNodePtr primary() {
    const LexToken* t = peek();
    if (!t) throw ParseFailure{};
    switch (t->kind) {
      case LexKind::Identifier:
      case LexKind::Number:
      case LexKind::String:
      case LexKind::Char: return leaf();
      case LexKind::Keyword:
        if (t->text == "true" || t->text == "false" || t->text == "null" ||
            t->text == "NULL" || t->text == "this" || t->text == "super") {
          return leaf();
        }
        if (t->text == "new") return creation();
        if (is_primitive(t->text) && at(".", 1)) return leaf();  // int.class
        throw ParseFailure{};
      case LexKind::Operator:
        if (t->text == "(") return parenthesized();
        if (t->text == "{") return initializer_list();
        throw ParseFailure{};
      default: throw ParseFailure{};
    }
  }

  Language lang_;
  std::vector<LexToken> toks_;
  std::size_t pos_ = 0;
};

void compute_ranges(PNode& n) {
  if (n.children.empty()) return;
  for (auto& c : n.children) compute_ranges(*c);
  n.begin = n.children.front()->begin;
  n.end = n.children.back()->end;
}

void insert_extra(PNode& root, const LexToken& extra) {
  PNode* current = &root;
  for (;;) {
    PNode* next = nullptr;
    for (auto& c : current->children) {
      if (!c->children.empty() && c->begin <= extra.begin && extra.end <= c->end) {
        next = c.get();
        break;
      }
    }
    if (!next) break;
    current = next;
  }
  auto leaf = make_node(extra.kind == LexKind::Comment ? "comment" : "preproc_directive");
  leaf->begin = extra.begin;
  leaf->end = extra.end;
  auto pos = std::upper_bound(
      current->children.begin(), current->children.end(), extra.begin,
      [](std::size_t offset, const PNodePtr& c) { return offset < c->begin; });
  current->children.insert(pos, std::move(leaf));
}

void flatten(const PNode& n, NodeId parent, std::uint32_t depth, std::vector<Node>& out) {
  const auto id = static_cast<NodeId>(out.size());
  out.push_back(Node{n.kind, {n.begin, n.end}, parent, {}, depth});
  for (const auto& c : n.children) {
    const auto child_id = static_cast<NodeId>(out.size());
    out[id].children.push_back(child_id);
    flatten(*c, id, depth + 1, out);
  }
}

}  // namespace

SyntaxTree parse_to_tree(std::string_view source, Language lang) {
  std::vector<LexToken> tokens;
  std::vector<LexToken> extras;
  Lexer(source, lang).run(tokens, extras);

  Parser parser(lang, std::move(tokens));
  PNodePtr root = parser.parse_program();
  compute_ranges(*root);
  for (const LexToken& e : extras) insert_extra(*root, e);
  root->begin = 0;
  root->end = source.size();

  std::vector<Node> nodes;
  flatten(*root, kNoParent, 0, nodes);
  return SyntaxTree(std::move(nodes));
}

}  // namespace sasa::ast
