/*
 * Copyright 2026 The solotrace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Concrete syntax (lowest to highest precedence):
//
//   formula  := ('forall' | 'exists') VAR 'in' NUM '..' NUM ':' formula
//             | disj ('->' formula)?
//   disj     := conj ('|' conj)*
//   conj     := binary ('&' binary)*
//   binary   := unary (('U' | 'S') interval binary)?
//   unary    := '!' unary
//             | ('F'|'G'|'X'|'P'|'H'|'Y') interval unary
//             | 'C[' cmp NUM ',' NUM ']' '(' formula ')'
//             | 'M[' cmp NUM ',' NUM ',' NUM ']' '(' formula ')'
//             | 'A[' cmp NUM ',' NUM ',' NUM ']' '(' formula ')'
//             | 'D[' cmp NUM ',' NUM ']' '(' formula ',' formula ')'
//             | 'true' | 'false' | ATOM | '(' formula ')' | quantifier
//   interval := ('(' | '[') NUM ',' (NUM | 'inf') (')' | ']')
//
// Operator letters are only operators when immediately followed by the
// opening bracket of their interval or parameter list; otherwise they are
// ordinary atoms. Atoms may carry index suffixes such as `a_{i}` or
// `a_{i+1,j}`, resolved against enclosing quantifier variables and joined
// with '_' (so `a_{2,3}` names atom `a_2_3`).

#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "solotrace/formula.hpp"

namespace solotrace {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

enum class Tok : std::uint8_t {
  End,
  Ident,      // plain identifier or atom template
  Number,
  TemporalOp, // F G X P H Y U S immediately followed by ( or [
  AggOp,      // C M A D immediately followed by [
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  DotDot,
  Bang,
  Amp,
  Pipe,
  Arrow,
  Cmp,
};

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string text;
  std::uint64_t number = 0;
  // Atom templates alternate literal text and `{...}` index lists; even
  // slots are literals, odd slots are raw index lists.
  std::vector<std::string> parts;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t at, std::string text) {
    Token t;
    t.kind = k;
    t.offset = at;
    t.text = std::move(text);
    out.push_back(std::move(t));
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      Token t;
      t.kind = Tok::Number;
      t.offset = start;
      t.text = std::string(src.substr(start, i - start));
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc{}) throw ParseError("number out of range", start);
      out.push_back(std::move(t));
      continue;
    }
    if (ident_start(c)) {
      Token t;
      t.kind = Tok::Ident;
      t.offset = start;
      std::string literal;
      while (i < src.size()) {
        if (ident_char(src[i])) {
          literal += src[i++];
        } else if (src[i] == '{') {
          const auto close = src.find('}', i);
          if (close == std::string_view::npos) throw ParseError("unterminated index suffix", i);
          t.parts.push_back(std::move(literal));
          literal.clear();
          t.parts.emplace_back(src.substr(i + 1, close - i - 1));
          i = close + 1;
        } else {
          break;
        }
      }
      t.parts.push_back(literal);
      t.text = std::string(src.substr(start, i - start));
      const char next = i < src.size() ? src[i] : '\0';
      if (t.parts.size() == 1 && t.text.size() == 1) {
        const char op = t.text[0];
        if ((op == 'F' || op == 'G' || op == 'X' || op == 'P' || op == 'H' || op == 'Y' || op == 'U' ||
             op == 'S') &&
            (next == '(' || next == '['))
          t.kind = Tok::TemporalOp;
        else if ((op == 'C' || op == 'M' || op == 'A' || op == 'D') && next == '[')
          t.kind = Tok::AggOp;
      }
      out.push_back(std::move(t));
      continue;
    }
    auto two = [&](std::string_view s) { return src.substr(i, 2) == s; };
    if (two("->")) { push(Tok::Arrow, start, "->"); i += 2; continue; }
    if (two("..")) { push(Tok::DotDot, start, ".."); i += 2; continue; }
    if (two("<=") || two(">=") || two("==")) {
      push(Tok::Cmp, start, std::string(src.substr(i, 2)));
      i += 2;
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, start, "("); break;
      case ')': push(Tok::RParen, start, ")"); break;
      case '[': push(Tok::LBracket, start, "["); break;
      case ']': push(Tok::RBracket, start, "]"); break;
      case ',': push(Tok::Comma, start, ","); break;
      case ':': push(Tok::Colon, start, ":"); break;
      case '!': push(Tok::Bang, start, "!"); break;
      case '&': push(Tok::Amp, start, "&"); break;
      case '|': push(Tok::Pipe, start, "|"); break;
      case '<':
      case '>':
      case '=': push(Tok::Cmp, start, std::string(1, c)); break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    ++i;
  }
  push(Tok::End, src.size(), "");
  return out;
}

class Parser {
 public:
  Parser(FormulaPool& pool, std::vector<Token> tokens) : pool_(pool), toks_(std::move(tokens)) {}

  NodeId parse_all() {
    const NodeId f = formula();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  struct Binding {
    std::string name;
    std::int64_t value;
  };

  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().offset); }

  const Token& expect(Tok k, std::string_view what) {
    if (peek().kind != k) fail("expected " + std::string(what));
    return take();
  }

  bool is_keyword(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  NodeId formula() {
    if (is_keyword("forall") || is_keyword("exists")) return quantifier();
    const NodeId lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      take();
      const NodeId rhs = formula();
      return pool_.disjunction({pool_.negation(lhs), rhs});
    }
    return lhs;
  }

  NodeId quantifier() {
    const bool universal = take().text == "forall";
    const Token& var = expect(Tok::Ident, "quantifier variable");
    if (var.parts.size() != 1 || reserved(var.text)) throw ParseError("bad quantifier variable", var.offset);
    const std::string name = var.text;
    if (!is_keyword("in")) fail("expected 'in'");
    take();
    const std::uint64_t from = expect(Tok::Number, "domain lower bound").number;
    expect(Tok::DotDot, "'..'");
    const std::uint64_t to = expect(Tok::Number, "domain upper bound").number;
    if (from > to) fail("empty quantifier domain");
    expect(Tok::Colon, "':'");
    const std::size_t body = pos_;
    std::vector<NodeId> parts;
    std::size_t end = body;
    for (std::uint64_t v = from; v <= to; ++v) {
      pos_ = body;
      env_.push_back({name, static_cast<std::int64_t>(v)});
      parts.push_back(formula());
      env_.pop_back();
      end = pos_;
    }
    pos_ = end;
    return universal ? conj(std::move(parts)) : disj(std::move(parts));
  }

  NodeId conj(std::vector<NodeId> parts) { return pool_.conjunction(flatten(Kind::And, parts)); }
  NodeId disj(std::vector<NodeId> parts) { return pool_.disjunction(flatten(Kind::Or, parts)); }

  std::vector<NodeId> flatten(Kind k, const std::vector<NodeId>& parts) const {
    std::vector<NodeId> out;
    for (NodeId p : parts) {
      const Node& n = pool_[p];
      if (n.kind == k)
        out.insert(out.end(), n.children.begin(), n.children.end());
      else
        out.push_back(p);
    }
    return out;
  }

  NodeId disjunction() {
    std::vector<NodeId> parts{conjunction()};
    while (peek().kind == Tok::Pipe) {
      take();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? parts.front() : disj(std::move(parts));
  }

  NodeId conjunction() {
    std::vector<NodeId> parts{binary()};
    while (peek().kind == Tok::Amp) {
      take();
      parts.push_back(binary());
    }
    return parts.size() == 1 ? parts.front() : conj(std::move(parts));
  }

  NodeId binary() {
    const NodeId lhs = unary();
    if (peek().kind == Tok::TemporalOp && (peek().text == "U" || peek().text == "S")) {
      const bool is_until = take().text == "U";
      const Interval iv = interval();
      const NodeId rhs = binary();
      return is_until ? pool_.until(iv, lhs, rhs) : pool_.since(iv, lhs, rhs);
    }
    return lhs;
  }

  NodeId unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Bang:
        take();
        return pool_.negation(unary());
      case Tok::LParen: {
        take();
        const NodeId f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::TemporalOp: {
        const char op = t.text[0];
        if (op == 'U' || op == 'S') fail("binary operator '" + t.text + "' without left operand");
        take();
        const Interval iv = interval();
        const NodeId f = unary();
        switch (op) {
          case 'F': return pool_.eventually(iv, f);
          case 'G': return pool_.always(iv, f);
          case 'X': return pool_.next(iv, f);
          case 'P': return pool_.once(iv, f);
          case 'H': return pool_.historically(iv, f);
          default: return pool_.yesterday(iv, f);
        }
      }
      case Tok::AggOp:
        return aggregate();
      case Tok::Ident:
        if (t.text == "forall" || t.text == "exists") return quantifier();
        if (t.text == "true") { take(); return pool_.truth(); }
        if (t.text == "false") { take(); return pool_.falsity(); }
        return atom();
      default:
        fail(t.kind == Tok::End ? "unexpected end of formula" : "unexpected '" + t.text + "'");
    }
  }

  static bool reserved(std::string_view w) {
    return w == "forall" || w == "exists" || w == "in" || w == "true" || w == "false" || w == "inf";
  }

  NodeId atom() {
    const Token& t = take();
    if (reserved(t.text)) throw ParseError("reserved word '" + t.text + "' used as atom", t.offset);
    std::string name;
    for (std::size_t i = 0; i < t.parts.size(); ++i) {
      if (i % 2 == 0)
        name += t.parts[i];
      else
        name += resolve_index(t.parts[i], t.offset);
    }
    return pool_.atom(std::move(name));
  }

  std::int64_t lookup(std::string_view var, std::size_t at) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->name == var) return it->value;
    throw ParseError("unbound index variable '" + std::string(var) + "'", at);
  }

  // "i", "7", "i+1", "j-2", comma separated.
  std::string resolve_index(std::string_view raw, std::size_t at) const {
    std::string out;
    std::size_t i = 0;
    auto skip_ws = [&] { while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i; };
    auto term = [&]() -> std::int64_t {
      skip_ws();
      if (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) {
        std::int64_t v = 0;
        while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) v = v * 10 + (raw[i++] - '0');
        return v;
      }
      if (i < raw.size() && ident_start(raw[i])) {
        const std::size_t s = i;
        while (i < raw.size() && ident_char(raw[i])) ++i;
        return lookup(raw.substr(s, i - s), at);
      }
      throw ParseError("malformed index expression '{" + std::string(raw) + "}'", at);
    };
    while (true) {
      std::int64_t v = term();
      skip_ws();
      while (i < raw.size() && (raw[i] == '+' || raw[i] == '-')) {
        const bool plus = raw[i++] == '+';
        const std::int64_t rhs = term();
        v = plus ? v + rhs : v - rhs;
        skip_ws();
      }
      if (v < 0) throw ParseError("negative index in '{" + std::string(raw) + "}'", at);
      if (!out.empty()) out += '_';
      out += std::to_string(v);
      if (i == raw.size()) break;
      if (raw[i] != ',') throw ParseError("malformed index expression '{" + std::string(raw) + "}'", at);
      ++i;
    }
    return out;
  }

  Interval interval() {
    bool lo_closed = false;
    if (peek().kind == Tok::LBracket)
      lo_closed = true;
    else if (peek().kind != Tok::LParen)
      fail("expected interval");
    take();
    const std::uint64_t lo = expect(Tok::Number, "interval lower bound").number;
    expect(Tok::Comma, "','");
    std::optional<std::uint64_t> hi;
    if (is_keyword("inf"))
      take();
    else
      hi = expect(Tok::Number, "interval upper bound or 'inf'").number;
    bool hi_closed = false;
    if (peek().kind == Tok::RBracket)
      hi_closed = true;
    else if (peek().kind != Tok::RParen)
      fail("expected ')' or ']'");
    const std::size_t at = take().offset;
    if (!hi && hi_closed) throw ParseError("infinite upper bound must be open", at);
    Interval iv{lo, hi, lo_closed, hi_closed};
    if (!iv.nonempty()) throw ParseError("empty interval " + iv.to_string(), at);
    return iv;
  }

  Comparator comparator() {
    const Token& t = expect(Tok::Cmp, "comparator");
    if (t.text == "<") return Comparator::Less;
    if (t.text == "<=") return Comparator::LessEqual;
    if (t.text == ">=") return Comparator::GreaterEqual;
    if (t.text == ">") return Comparator::Greater;
    return Comparator::Equal;
  }

  NodeId aggregate() {
    const Token& head = take();
    const char op = head.text[0];
    expect(Tok::LBracket, "'['");
    const Comparator cmp = comparator();
    const std::uint64_t n = expect(Tok::Number, "bound n").number;
    expect(Tok::Comma, "','");
    const std::uint64_t window = expect(Tok::Number, "window K").number;
    std::uint64_t step = 0;
    if (op == 'M' || op == 'A') {
      expect(Tok::Comma, "','");
      step = expect(Tok::Number, "step h").number;
      if (step == 0) throw ParseError("step h must be at least 1", head.offset);
      if (window < step) throw ParseError("window K must not be smaller than step h", head.offset);
    }
    expect(Tok::RBracket, "']'");
    expect(Tok::LParen, "'('");
    const NodeId arg = formula();
    NodeId second{};
    if (op == 'D') {
      expect(Tok::Comma, "',' (D takes two arguments)");
      second = formula();
    }
    if (peek().kind == Tok::Comma) fail("too many arguments for '" + std::string(1, op) + "'");
    expect(Tok::RParen, "')'");
    switch (op) {
      case 'C': return pool_.count(cmp, n, window, arg);
      case 'M': return pool_.max_count(cmp, n, window, step, arg);
      case 'A': return pool_.avg_count(cmp, n, window, step, arg);
      default: return pool_.avg_dist(cmp, n, window, arg, second);
    }
  }

  FormulaPool& pool_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Binding> env_;
};

}  // namespace detail

/// Parses `text` into `pool`. Quantifiers are expanded over their finite
/// domain, conjunctions and disjunctions are flattened and deduplicated.
/// Surface forms (F, G, X, P, H, Y, A[...]) are kept; see rewrite_derived.
inline NodeId parse_formula(FormulaPool& pool, std::string_view text) {
  return detail::Parser(pool, detail::tokenize(text)).parse_all();
}

}  // namespace solotrace
