// Textual syntax: AVM rendering and parsing, and the grammar file format.
//
// A grammar file has five sections.  `%%` comments run to end of line and
// every statement ends with a period:
//
//   %types     child sub parent [parent ...] .
//   %approp    FEAT : holder -> value .        (declaration order is the
//                                               feature output order)
//   %start     [avm] .
//   %rules     id : avm [, avm ...] => avm .   (body elements, then head)
//   %lexicon   word : avm .                    (repeat a word for ambiguity)
//
// AVMs are `[type FEAT:value ...]`; `#n=[...]` binds a reentrancy tag and
// `#n` references it.  Tags scope over one statement and need exactly one
// binding.  Rendering produces the same syntax back; parsing a rendering
// reproduces the structure exactly (canonical forms make this equality).

#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tfs/amrs.hpp"
#include "tfs/fs.hpp"
#include "tfs/grammar.hpp"
#include "tfs/types.hpp"

namespace tfs {

// ---- diagnostics --------------------------------------------------------

struct Diagnostic {
  enum Severity { Error, Warning } severity;
  int line = 0, col = 0; // 1-based; 0 = no position
  std::string message;
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Diagnostic::Error) return true;
  return false;
}

inline std::string format_diagnostic(const Diagnostic& d, bool color) {
  std::string sev = d.severity == Diagnostic::Error ? "error" : "warning";
  if (color) {
    const char* code = d.severity == Diagnostic::Error ? "\x1b[31m" : "\x1b[33m";
    sev = code + sev + "\x1b[0m";
  }
  std::string out = sev + ": " + d.message;
  if (d.line > 0)
    out += " (line " + std::to_string(d.line) + ", col " +
           std::to_string(d.col) + ")";
  return out;
}

// ---- rendering ----------------------------------------------------------

namespace detail {
inline void render_node(const TypeHierarchy& hier,
                        const std::vector<Node>& nodes, NodeId q,
                        const std::vector<int>& refs, std::vector<int>& tag,
                        int& next_tag, std::string& out) {
  if (tag[q] != 0) { // already printed (or being printed: cycles land here)
    out += '#';
    out += std::to_string(tag[q]);
    return;
  }
  if (refs[q] >= 2) {
    tag[q] = next_tag++;
    out += '#';
    out += std::to_string(tag[q]);
    out += '=';
  }
  out += '[';
  out += hier.type_name(nodes[q].type);
  for (const Arc& a : nodes[q].arcs) {
    out += ' ';
    out += hier.feature_name(a.feat);
    out += ':';
    render_node(hier, nodes, a.target, refs, tag, next_tag, out);
  }
  out += ']';
}

inline std::string render_graph(const TypeHierarchy& hier,
                                const std::vector<Node>& nodes,
                                std::span<const NodeId> roots) {
  std::vector<int> refs(nodes.size(), 0);
  for (const Node& n : nodes)
    for (const Arc& a : n.arcs) ++refs[a.target];
  for (NodeId r : roots) ++refs[r];
  std::vector<int> tag(nodes.size(), 0);
  int next_tag = 1;
  std::string out;
  for (std::size_t t = 0; t < roots.size(); ++t) {
    if (t) out += ", ";
    render_node(hier, nodes, roots[t], refs, tag, next_tag, out);
  }
  return out;
}
} // namespace detail

inline std::string render(const TypeHierarchy& hier, const Fs& fs) {
  NodeId r[1] = {0};
  return detail::render_graph(hier, fs.nodes, r);
}

inline std::string render(const TypeHierarchy& hier, const Amrs& a) {
  return detail::render_graph(hier, a.nodes, a.roots);
}

// ---- lexer --------------------------------------------------------------

namespace detail {

struct Token {
  enum Kind {
    Section, // %name
    Ident,
    Tag, // #n
    LBracket,
    RBracket,
    Colon,
    Arrow,   // ->
    Implies, // =>
    Comma,
    Dot,
    Equals,
    End,
  };
  Kind kind;
  std::string text;
  int tag = 0;
  int line = 1, col = 1;
};

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::vector<Token> lex(std::string_view src,
                              std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto bump = [&](std::size_t k) {
    for (std::size_t t = 0; t < k; ++t, ++i) {
      if (i < src.size() && src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump(1);
      continue;
    }
    int tl = line, tc = col;
    if (c == '%') {
      if (i + 1 < src.size() && src[i + 1] == '%') {
        while (i < src.size() && src[i] != '\n') bump(1);
        continue;
      }
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      if (j == i + 1) {
        diags.push_back({Diagnostic::Error, tl, tc, "stray '%'"});
        bump(1);
        continue;
      }
      out.push_back({Token::Section, std::string(src.substr(i + 1, j - i - 1)),
                     0, tl, tc});
      bump(j - i);
      continue;
    }
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      if (j == i + 1) {
        diags.push_back({Diagnostic::Error, tl, tc, "'#' needs a tag number"});
        bump(1);
        continue;
      }
      Token t{Token::Tag, std::string(src.substr(i, j - i)), 0, tl, tc};
      t.tag = std::stoi(std::string(src.substr(i + 1, j - i - 1)));
      out.push_back(std::move(t));
      bump(j - i);
      continue;
    }
    if (c == '-') {
      if (i + 1 < src.size() && src[i + 1] == '>') {
        out.push_back({Token::Arrow, "->", 0, tl, tc});
        bump(2);
        continue;
      }
      diags.push_back({Diagnostic::Error, tl, tc, "stray '-'"});
      bump(1);
      continue;
    }
    if (c == '=') {
      if (i + 1 < src.size() && src[i + 1] == '>') {
        out.push_back({Token::Implies, "=>", 0, tl, tc});
        bump(2);
        continue;
      }
      out.push_back({Token::Equals, "=", 0, tl, tc});
      bump(1);
      continue;
    }
    if (c == '[') { out.push_back({Token::LBracket, "[", 0, tl, tc}); bump(1); continue; }
    if (c == ']') { out.push_back({Token::RBracket, "]", 0, tl, tc}); bump(1); continue; }
    if (c == ':') { out.push_back({Token::Colon, ":", 0, tl, tc}); bump(1); continue; }
    if (c == ',') { out.push_back({Token::Comma, ",", 0, tl, tc}); bump(1); continue; }
    if (c == '.') { out.push_back({Token::Dot, ".", 0, tl, tc}); bump(1); continue; }
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Token::Ident, std::string(src.substr(i, j - i)), 0, tl, tc});
      bump(j - i);
      continue;
    }
    diags.push_back({Diagnostic::Error, tl, tc,
                     std::string("unexpected character '") + c + "'"});
    bump(1);
  }
  out.push_back({Token::End, "", 0, line, col});
  return out;
}

// ---- AVM parsing: token range -> AST -> graph ---------------------------

struct AvmAst {
  int tag = 0; // 0 = untagged
  bool has_body = false;
  std::string type;
  int line = 0, col = 0;
  // feature name, its position, child AST index
  std::vector<std::tuple<std::string, int, int, int>> feats;
};

class Cursor {
 public:
  Cursor(std::span<const Token> toks, std::vector<Diagnostic>& diags)
      : toks_(toks), diags_(&diags) {}
  const Token& peek() const { return pos_ < toks_.size() ? toks_[pos_] : toks_.back(); }
  const Token& next() { const Token& t = peek(); if (pos_ < toks_.size()) ++pos_; return t; }
  bool at(Token::Kind k) const { return peek().kind == k; }
  bool done() const { return pos_ >= toks_.size() || at(Token::End); }
  bool expect(Token::Kind k, const char* what) {
    if (at(k)) { next(); return true; }
    error(std::string("expected ") + what);
    return false;
  }
  void error(std::string msg) {
    const Token& t = peek();
    diags_->push_back({Diagnostic::Error, t.line, t.col,
                       std::move(msg) + (t.kind == Token::End
                                             ? " but found end of input"
                                             : " but found '" + t.text + "'")});
  }

 private:
  std::span<const Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>* diags_;
};

inline int parse_avm(Cursor& cur, std::vector<AvmAst>& arena,
                     std::vector<Diagnostic>& diags);

inline int parse_avm_body(Cursor& cur, std::vector<AvmAst>& arena,
                          std::vector<Diagnostic>& diags, int tag) {
  const Token& lb = cur.peek();
  if (!cur.expect(Token::LBracket, "'['")) return -1;
  int idx = static_cast<int>(arena.size());
  arena.push_back({});
  arena[idx].tag = tag;
  arena[idx].has_body = true;
  arena[idx].line = lb.line;
  arena[idx].col = lb.col;
  if (!cur.at(Token::Ident)) {
    cur.error("expected a type name");
    return -1;
  }
  arena[idx].type = cur.next().text;
  while (true) {
    if (cur.at(Token::RBracket)) {
      cur.next();
      return idx;
    }
    if (!cur.at(Token::Ident)) {
      cur.error("expected a feature name or ']'");
      return -1;
    }
    Token feat = cur.next();
    if (!cur.expect(Token::Colon, "':' after feature name")) return -1;
    int child = parse_avm(cur, arena, diags);
    if (child < 0) return -1;
    arena[idx].feats.push_back({feat.text, feat.line, feat.col, child});
  }
}

inline int parse_avm(Cursor& cur, std::vector<AvmAst>& arena,
                     std::vector<Diagnostic>& diags) {
  if (cur.at(Token::Tag)) {
    Token t = cur.next();
    if (cur.at(Token::Equals)) {
      cur.next();
      return parse_avm_body(cur, arena, diags, t.tag);
    }
    int idx = static_cast<int>(arena.size());
    arena.push_back({});
    arena[idx].tag = t.tag;
    arena[idx].line = t.line;
    arena[idx].col = t.col;
    return idx;
  }
  if (cur.at(Token::LBracket)) return parse_avm_body(cur, arena, diags, 0);
  cur.error("expected an AVM");
  return -1;
}

// Builds the graph for one statement scope.  Tags resolve across all the
// statement's elements; every tag needs exactly one `#n=[...]` binding.
class ScopeBuilder {
 public:
  ScopeBuilder(const TypeHierarchy& hier, const std::vector<AvmAst>& arena,
               std::vector<Diagnostic>& diags)
      : hier_(&hier), arena_(&arena), diags_(&diags),
        node_of_(arena.size(), -1) {
    for (std::size_t i = 0; i < arena.size(); ++i) {
      const AvmAst& a = arena[i];
      if (a.tag != 0 && a.has_body) {
        auto [it, fresh] = binding_.try_emplace(a.tag, static_cast<int>(i));
        if (!fresh) {
          diags_->push_back({Diagnostic::Error, a.line, a.col,
                             "tag #" + std::to_string(a.tag) +
                                 " is bound more than once"});
          ok_ = false;
        }
      }
    }
  }

  bool ok() const { return ok_; }
  std::vector<Node>& nodes() { return nodes_; }

  NodeId build(int idx) {
    const AvmAst& a = (*arena_)[idx];
    if (!a.has_body) { // tag reference
      auto it = binding_.find(a.tag);
      if (it == binding_.end()) {
        diags_->push_back({Diagnostic::Error, a.line, a.col,
                           "tag #" + std::to_string(a.tag) +
                               " is never bound"});
        ok_ = false;
        return fresh_node(kBot);
      }
      idx = it->second;
    }
    if (node_of_[idx] >= 0) return static_cast<NodeId>(node_of_[idx]);
    const AvmAst& b = (*arena_)[idx];
    NodeId id = fresh_node(kBot);
    node_of_[idx] = static_cast<int>(id); // set before children: cycles
    auto ty = hier_->find_type(b.type);
    if (!ty) {
      diags_->push_back({Diagnostic::Error, b.line, b.col,
                         "unknown type '" + b.type + "'"});
      ok_ = false;
    } else {
      nodes_[id].type = *ty;
    }
    for (const auto& [fname, fline, fcol, child] : b.feats) {
      auto f = hier_->find_feature(fname);
      if (!f) {
        diags_->push_back({Diagnostic::Error, fline, fcol,
                           "unknown feature '" + fname + "'"});
        ok_ = false;
        continue;
      }
      NodeId target = build(child);
      auto& arcs = nodes_[id].arcs;
      auto it = std::lower_bound(
          arcs.begin(), arcs.end(), *f,
          [](const Arc& x, FeatId ff) { return x.feat < ff; });
      if (it != arcs.end() && it->feat == *f) {
        diags_->push_back({Diagnostic::Error, fline, fcol,
                           "feature '" + fname + "' given twice"});
        ok_ = false;
        continue;
      }
      arcs.insert(it, {*f, target});
    }
    return id;
  }

 private:
  NodeId fresh_node(TypeId t) {
    nodes_.push_back({t, {}});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  const TypeHierarchy* hier_;
  const std::vector<AvmAst>* arena_;
  std::vector<Diagnostic>* diags_;
  std::vector<int> node_of_;
  std::unordered_map<int, int> binding_;
  std::vector<Node> nodes_;
  bool ok_ = true;
};

// Parses a comma-separated AVM sequence from a token range (one statement
// scope) and assembles the canonical AMRS.
inline std::optional<Amrs> parse_avm_sequence(const TypeHierarchy& hier,
                                              Cursor& cur,
                                              std::vector<Diagnostic>& diags,
                                              Token::Kind stop) {
  std::vector<AvmAst> arena;
  std::vector<int> elements;
  while (true) {
    int e = parse_avm(cur, arena, diags);
    if (e < 0) return std::nullopt;
    elements.push_back(e);
    if (cur.at(Token::Comma)) {
      cur.next();
      continue;
    }
    break;
  }
  if (!cur.at(stop)) {
    cur.error(stop == Token::Dot ? "expected ',' or '.'"
                                 : "expected ',' or end of input");
    return std::nullopt;
  }
  ScopeBuilder sb(hier, arena, diags);
  std::vector<NodeId> roots;
  for (int e : elements) roots.push_back(sb.build(e));
  if (!sb.ok()) return std::nullopt;
  auto canon = canonicalize_amrs(hier, sb.nodes(), roots);
  // Everything built from an AVM statement is reachable from its elements.
  return std::get<Amrs>(std::move(canon));
}

} // namespace detail

// ---- standalone AVM text (tests, tooling) -------------------------------

struct AvmText {
  std::optional<Amrs> value;
  std::vector<Diagnostic> diagnostics;
  explicit operator bool() const { return value.has_value(); }
};

// Parses one comma-separated AVM sequence (a single tag scope, no final
// period) against an existing hierarchy.
inline AvmText parse_avm_text(const TypeHierarchy& hier,
                              std::string_view text) {
  AvmText out;
  auto toks = detail::lex(text, out.diagnostics);
  if (has_errors(out.diagnostics)) return out;
  detail::Cursor cur(toks, out.diagnostics);
  auto seq = detail::parse_avm_sequence(hier, cur, out.diagnostics,
                                        detail::Token::End);
  if (seq && !has_errors(out.diagnostics)) out.value = std::move(*seq);
  return out;
}

// Single-structure convenience: parse text that must denote one element.
inline std::optional<Fs> parse_fs_text(const TypeHierarchy& hier,
                                       std::string_view text) {
  AvmText t = parse_avm_text(hier, text);
  if (!t.value || t.value->len() != 1) return std::nullopt;
  return project(hier, *t.value, 1);
}

// ---- grammar files ------------------------------------------------------

struct LoadResult {
  std::optional<Grammar> grammar;
  std::vector<Diagnostic> diagnostics;
  explicit operator bool() const { return grammar.has_value(); }
};

inline LoadResult load_grammar(std::string_view text) {
  LoadResult out;
  auto& diags = out.diagnostics;
  auto toks = detail::lex(text, diags);
  if (has_errors(diags)) return out;

  // Split into sections of statements (token ranges ending before '.').
  enum Sec { None, Types, Approp, Start, Rules, Lexicon };
  struct Stmt {
    Sec sec;
    std::size_t first, dot; // [first, dot] with toks[dot].kind == Dot
  };
  std::vector<Stmt> stmts;
  bool seen[6] = {false, false, false, false, false, false};
  int sec_line[6] = {0, 0, 0, 0, 0, 0};
  Sec sec = None;
  std::size_t i = 0;
  while (toks[i].kind != detail::Token::End) {
    if (toks[i].kind == detail::Token::Section) {
      const std::string& name = toks[i].text;
      Sec s = name == "types"     ? Types
              : name == "approp"  ? Approp
              : name == "start"   ? Start
              : name == "rules"   ? Rules
              : name == "lexicon" ? Lexicon
                                  : None;
      if (s == None) {
        diags.push_back({Diagnostic::Error, toks[i].line, toks[i].col,
                         "unknown section '%" + name + "'"});
      } else if (seen[s]) {
        diags.push_back({Diagnostic::Error, toks[i].line, toks[i].col,
                         "section '%" + name + "' appears twice"});
      } else {
        seen[s] = true;
        sec_line[s] = toks[i].line;
      }
      sec = s;
      ++i;
      continue;
    }
    if (sec == None) {
      diags.push_back({Diagnostic::Error, toks[i].line, toks[i].col,
                       "statement outside any section"});
      while (toks[i].kind != detail::Token::End &&
             toks[i].kind != detail::Token::Dot)
        ++i;
      if (toks[i].kind == detail::Token::Dot) ++i;
      continue;
    }
    std::size_t first = i;
    while (toks[i].kind != detail::Token::End &&
           toks[i].kind != detail::Token::Dot &&
           toks[i].kind != detail::Token::Section)
      ++i;
    if (toks[i].kind != detail::Token::Dot) {
      diags.push_back({Diagnostic::Error, toks[first].line, toks[first].col,
                       "statement is missing its closing '.'"});
      continue;
    }
    stmts.push_back({sec, first, i});
    ++i;
  }
  for (Sec s : {Types, Start, Rules, Lexicon}) {
    if (!seen[s]) {
      const char* names[] = {"", "types", "approp", "start", "rules", "lexicon"};
      diags.push_back({Diagnostic::Error, 0, 0,
                       std::string("missing section '%") + names[s] + "'"});
    }
  }
  if (has_errors(diags)) return out;

  Grammar g;

  // Types: register every child name first so parents can forward-reference.
  for (const Stmt& st : stmts) {
    if (st.sec != Types) continue;
    if (toks[st.first].kind == detail::Token::Ident)
      g.hier.add_type(toks[st.first].text);
  }
  for (const Stmt& st : stmts) {
    if (st.sec != Types) continue;
    detail::Cursor cur(
        std::span<const detail::Token>(toks).subspan(st.first,
                                                     st.dot - st.first + 1),
        diags);
    if (!cur.at(detail::Token::Ident)) {
      cur.error("expected a type name");
      continue;
    }
    std::string child = cur.next().text;
    if (!cur.at(detail::Token::Ident) || cur.peek().text != "sub") {
      cur.error("expected 'sub'");
      continue;
    }
    cur.next();
    TypeId cid = *g.hier.find_type(child);
    bool any = false;
    while (cur.at(detail::Token::Ident)) {
      const detail::Token& p = cur.next();
      auto pid = g.hier.find_type(p.text);
      if (!pid) {
        diags.push_back({Diagnostic::Error, p.line, p.col,
                         "type '" + p.text +
                             "' is used as a parent but never declared"});
        continue;
      }
      g.hier.declare_subtype(cid, *pid);
      any = true;
    }
    if (!any && !has_errors(diags))
      cur.error("expected at least one parent type");
    if (!cur.at(detail::Token::Dot)) cur.error("expected '.'");
  }
  // Duplicate child declarations.
  {
    std::unordered_map<std::string, int> first_line;
    for (const Stmt& st : stmts) {
      if (st.sec != Types) continue;
      if (toks[st.first].kind != detail::Token::Ident) continue;
      auto [it, fresh] =
          first_line.try_emplace(toks[st.first].text, toks[st.first].line);
      if (!fresh)
        diags.push_back({Diagnostic::Error, toks[st.first].line,
                         toks[st.first].col,
                         "type '" + toks[st.first].text + "' declared twice"});
    }
  }
  if (has_errors(diags)) return out;

  // Appropriateness; declaration order fixes the feature output order.
  for (const Stmt& st : stmts) {
    if (st.sec != Approp) continue;
    detail::Cursor cur(
        std::span<const detail::Token>(toks).subspan(st.first,
                                                     st.dot - st.first + 1),
        diags);
    if (!cur.at(detail::Token::Ident)) { cur.error("expected a feature name"); continue; }
    std::string feat = cur.next().text;
    if (!cur.expect(detail::Token::Colon, "':'")) continue;
    if (!cur.at(detail::Token::Ident)) { cur.error("expected a holder type"); continue; }
    const detail::Token& holder = cur.next();
    if (!cur.expect(detail::Token::Arrow, "'->'")) continue;
    if (!cur.at(detail::Token::Ident)) { cur.error("expected a value type"); continue; }
    const detail::Token& value = cur.next();
    if (!cur.at(detail::Token::Dot)) { cur.error("expected '.'"); continue; }
    auto h = g.hier.find_type(holder.text);
    auto v = g.hier.find_type(value.text);
    if (!h)
      diags.push_back({Diagnostic::Error, holder.line, holder.col,
                       "unknown type '" + holder.text + "'"});
    if (!v)
      diags.push_back({Diagnostic::Error, value.line, value.col,
                       "unknown type '" + value.text + "'"});
    if (h && v) g.hier.declare_approp(g.hier.add_feature(feat), *h, *v);
  }
  if (has_errors(diags)) return out;

  for (const HierarchyIssue& iss : g.hier.validate())
    diags.push_back({Diagnostic::Error, sec_line[Types], 1, iss.message});
  if (has_errors(diags)) return out;

  // Start structure.
  for (const Stmt& st : stmts) {
    if (st.sec != Start) continue;
    detail::Cursor cur(
        std::span<const detail::Token>(toks).subspan(st.first,
                                                     st.dot - st.first + 1),
        diags);
    auto seq = detail::parse_avm_sequence(g.hier, cur, diags,
                                          detail::Token::Dot);
    if (!seq) continue;
    if (seq->len() != 1) {
      diags.push_back({Diagnostic::Error, toks[st.first].line,
                       toks[st.first].col,
                       "start must be a single structure"});
      continue;
    }
    if (!g.start.nodes.empty()) {
      diags.push_back({Diagnostic::Error, toks[st.first].line,
                       toks[st.first].col, "start declared twice"});
      continue;
    }
    g.start = project(g.hier, *seq, 1);
  }
  if (g.start.nodes.empty() && !has_errors(diags))
    diags.push_back({Diagnostic::Error, sec_line[Start], 1,
                     "section '%start' declares no structure"});
  if (has_errors(diags)) return out;

  // Rules: id : body [, body ...] => head .
  for (const Stmt& st : stmts) {
    if (st.sec != Rules) continue;
    detail::Cursor cur(
        std::span<const detail::Token>(toks).subspan(st.first,
                                                     st.dot - st.first + 1),
        diags);
    if (!cur.at(detail::Token::Ident)) { cur.error("expected a rule id"); continue; }
    const detail::Token& id = cur.next();
    if (!cur.expect(detail::Token::Colon, "':' after the rule id")) continue;
    // Body and head share one tag scope, so parse all elements together.
    std::vector<detail::AvmAst> arena;
    std::vector<int> elements;
    bool bad = false;
    while (true) {
      int e = detail::parse_avm(cur, arena, diags);
      if (e < 0) { bad = true; break; }
      elements.push_back(e);
      if (cur.at(detail::Token::Comma)) { cur.next(); continue; }
      break;
    }
    if (bad) continue;
    if (!cur.expect(detail::Token::Implies, "'=>'")) continue;
    int head = detail::parse_avm(cur, arena, diags);
    if (head < 0) continue;
    if (!cur.at(detail::Token::Dot)) { cur.error("expected '.'"); continue; }
    elements.push_back(head); // head goes last
    detail::ScopeBuilder sb(g.hier, arena, diags);
    std::vector<NodeId> roots;
    for (int e : elements) roots.push_back(sb.build(e));
    if (!sb.ok()) continue;
    for (const Rule& r : g.rules)
      if (r.id == id.text)
        diags.push_back({Diagnostic::Error, id.line, id.col,
                         "rule id '" + id.text + "' already used"});
    auto canon = canonicalize_amrs(g.hier, sb.nodes(), roots);
    g.rules.push_back({id.text, std::get<Amrs>(std::move(canon))});
  }
  if (has_errors(diags)) return out;

  // Lexicon: word : category .  Repeating a word adds a category.
  for (const Stmt& st : stmts) {
    if (st.sec != Lexicon) continue;
    detail::Cursor cur(
        std::span<const detail::Token>(toks).subspan(st.first,
                                                     st.dot - st.first + 1),
        diags);
    if (!cur.at(detail::Token::Ident)) { cur.error("expected a word"); continue; }
    const detail::Token& word = cur.next();
    if (!cur.expect(detail::Token::Colon, "':' after the word")) continue;
    auto seq = detail::parse_avm_sequence(g.hier, cur, diags,
                                          detail::Token::Dot);
    if (!seq) continue;
    if (seq->len() != 1) {
      diags.push_back({Diagnostic::Error, word.line, word.col,
                       "a lexical entry is a single structure"});
      continue;
    }
    Fs cat = project(g.hier, *seq, 1);
    bool found = false;
    for (auto& [w, cats] : g.lexicon) {
      if (w == word.text) {
        cats.push_back(std::move(cat));
        found = true;
        break;
      }
    }
    if (!found) g.lexicon.push_back({word.text, {std::move(cat)}});
  }
  if (has_errors(diags)) return out;

  out.grammar = std::move(g);
  return out;
}

} // namespace tfs
