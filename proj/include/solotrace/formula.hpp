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

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "solotrace/types.hpp"

namespace solotrace {

enum class Kind : std::uint8_t {
  // core connectives, evaluated by both the oracle and the engine
  Atom,
  True,
  False,
  Not,
  And,
  Or,
  Until,
  Since,
  Always,
  Historically,
  Count,
  MaxCount,
  AvgDist,
  // surface forms removed by rewrite_derived
  AvgCount,
  Eventually,
  Next,
  Once,
  Yesterday,
};

inline std::string_view kind_name(Kind k) noexcept {
  switch (k) {
    case Kind::Atom: return "atom";
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Not: return "not";
    case Kind::And: return "and";
    case Kind::Or: return "or";
    case Kind::Until: return "until";
    case Kind::Since: return "since";
    case Kind::Always: return "always";
    case Kind::Historically: return "historically";
    case Kind::Count: return "count";
    case Kind::MaxCount: return "max";
    case Kind::AvgDist: return "avgdist";
    case Kind::AvgCount: return "avgcount";
    case Kind::Eventually: return "eventually";
    case Kind::Next: return "next";
    case Kind::Once: return "once";
    case Kind::Yesterday: return "yesterday";
  }
  return "?";
}

/// Kinds accepted by build_table, the oracle and the engine.
constexpr bool is_core(Kind k) noexcept { return k <= Kind::AvgDist; }

/// Atoms plus the true/false pseudo-atoms: the height-0 formulae.
constexpr bool is_leaf(Kind k) noexcept { return k == Kind::Atom || k == Kind::True || k == Kind::False; }

constexpr bool is_aggregate(Kind k) noexcept {
  return k == Kind::Count || k == Kind::MaxCount || k == Kind::AvgDist || k == Kind::AvgCount;
}

constexpr bool has_interval(Kind k) noexcept {
  switch (k) {
    case Kind::Until:
    case Kind::Since:
    case Kind::Always:
    case Kind::Historically:
    case Kind::Eventually:
    case Kind::Next:
    case Kind::Once:
    case Kind::Yesterday:
      return true;
    default:
      return false;
  }
}

/// Handle to a node owned by a FormulaPool.
struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Parameters of the aggregate modalities. `window` is K, `step` is h,
/// `bound` is n.
struct AggregateParams {
  Comparator cmp = Comparator::Less;
  std::uint64_t bound = 0;
  std::uint64_t window = 0;
  std::uint64_t step = 0;
  friend bool operator==(const AggregateParams&, const AggregateParams&) = default;
};

struct Node {
  Kind kind = Kind::Atom;
  std::vector<NodeId> children;
  std::string atom;
  Interval interval;
  AggregateParams agg;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Arena of hash-consed formula nodes. Structurally equal nodes share one
/// NodeId, so a subformula appearing twice in a formula is one lattice
/// element. And/Or children are kept as sorted, duplicate-free sets.
class FormulaPool {
 public:
  [[nodiscard]] const Node& operator[](NodeId id) const { return nodes_.at(id.value); }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

  NodeId atom(std::string name) {
    if (name.empty()) throw std::invalid_argument("empty atom name");
    if (name == "true" || name == "false") throw std::invalid_argument("reserved atom name '" + name + "'");
    Node n;
    n.kind = Kind::Atom;
    n.atom = std::move(name);
    return intern(std::move(n));
  }
  NodeId truth() { return intern(Node{Kind::True, {}, {}, {}, {}}); }
  NodeId falsity() { return intern(Node{Kind::False, {}, {}, {}, {}}); }
  NodeId negation(NodeId f) { return intern(Node{Kind::Not, {f}, {}, {}, {}}); }

  /// Conjunction as a set: duplicates are removed and a single remaining
  /// operand is returned unchanged. Nested conjunctions are kept as given.
  NodeId conjunction(std::vector<NodeId> fs) { return junction(Kind::And, std::move(fs)); }
  NodeId disjunction(std::vector<NodeId> fs) { return junction(Kind::Or, std::move(fs)); }

  NodeId until(const Interval& iv, NodeId lhs, NodeId rhs) { return binary_temporal(Kind::Until, iv, lhs, rhs); }
  NodeId since(const Interval& iv, NodeId lhs, NodeId rhs) { return binary_temporal(Kind::Since, iv, lhs, rhs); }

  NodeId always(const Interval& iv, NodeId f) { return unary_temporal(Kind::Always, iv, f); }
  NodeId historically(const Interval& iv, NodeId f) { return unary_temporal(Kind::Historically, iv, f); }
  NodeId eventually(const Interval& iv, NodeId f) { return unary_temporal(Kind::Eventually, iv, f); }
  NodeId next(const Interval& iv, NodeId f) { return unary_temporal(Kind::Next, iv, f); }
  NodeId once(const Interval& iv, NodeId f) { return unary_temporal(Kind::Once, iv, f); }
  NodeId yesterday(const Interval& iv, NodeId f) { return unary_temporal(Kind::Yesterday, iv, f); }

  NodeId count(Comparator cmp, std::uint64_t n, std::uint64_t window, NodeId f) {
    return intern(Node{Kind::Count, {f}, {}, {}, {cmp, n, window, 0}});
  }
  NodeId max_count(Comparator cmp, std::uint64_t n, std::uint64_t window, std::uint64_t step, NodeId f) {
    check_step(window, step);
    return intern(Node{Kind::MaxCount, {f}, {}, {}, {cmp, n, window, step}});
  }
  NodeId avg_count(Comparator cmp, std::uint64_t n, std::uint64_t window, std::uint64_t step, NodeId f) {
    check_step(window, step);
    return intern(Node{Kind::AvgCount, {f}, {}, {}, {cmp, n, window, step}});
  }
  NodeId avg_dist(Comparator cmp, std::uint64_t n, std::uint64_t window, NodeId start, NodeId end) {
    return intern(Node{Kind::AvgDist, {start, end}, {}, {}, {cmp, n, window, 0}});
  }

  /// Copy of `n` with its children replaced; used by rewriters.
  NodeId rebuild(const Node& n, std::vector<NodeId> children) {
    Node copy = n;
    copy.children = std::move(children);
    if (copy.kind == Kind::And || copy.kind == Kind::Or) return junction(copy.kind, std::move(copy.children));
    return intern(std::move(copy));
  }

  /// Fully parenthesised rendering in the concrete grammar accepted by
  /// parse_formula.
  [[nodiscard]] std::string to_string(NodeId id) const {
    const Node& n = (*this)[id];
    auto child = [&](std::size_t i) { return to_string(n.children[i]); };
    auto agg_head = [&](std::string_view letter) {
      std::string s(letter);
      s += '[';
      s += solotrace::to_string(n.agg.cmp);
      s += std::to_string(n.agg.bound) + "," + std::to_string(n.agg.window);
      if (n.kind == Kind::MaxCount || n.kind == Kind::AvgCount) s += "," + std::to_string(n.agg.step);
      return s + "](";
    };
    switch (n.kind) {
      case Kind::Atom: return n.atom;
      case Kind::True: return "true";
      case Kind::False: return "false";
      case Kind::Not: return "!" + child(0);
      case Kind::And:
      case Kind::Or: {
        // operands sorted by text so the rendering does not depend on ids
        std::vector<std::string> parts;
        for (std::size_t i = 0; i < n.children.size(); ++i) parts.push_back(child(i));
        std::sort(parts.begin(), parts.end());
        std::string s = "(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
          if (i) s += n.kind == Kind::And ? " & " : " | ";
          s += parts[i];
        }
        return s + ")";
      }
      case Kind::Until: return "(" + child(0) + " U" + n.interval.to_string() + " " + child(1) + ")";
      case Kind::Since: return "(" + child(0) + " S" + n.interval.to_string() + " " + child(1) + ")";
      case Kind::Always: return "G" + n.interval.to_string() + " " + child(0);
      case Kind::Historically: return "H" + n.interval.to_string() + " " + child(0);
      case Kind::Eventually: return "F" + n.interval.to_string() + " " + child(0);
      case Kind::Next: return "X" + n.interval.to_string() + " " + child(0);
      case Kind::Once: return "P" + n.interval.to_string() + " " + child(0);
      case Kind::Yesterday: return "Y" + n.interval.to_string() + " " + child(0);
      case Kind::Count: return agg_head("C") + child(0) + ")";
      case Kind::MaxCount: return agg_head("M") + child(0) + ")";
      case Kind::AvgCount: return agg_head("A") + child(0) + ")";
      case Kind::AvgDist: return agg_head("D") + child(0) + ", " + child(1) + ")";
    }
    return "?";
  }

 private:
  struct NodeHash {
    std::size_t operator()(const Node& n) const noexcept {
      std::size_t h = std::hash<std::uint8_t>{}(static_cast<std::uint8_t>(n.kind));
      auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
      for (NodeId c : n.children) mix(c.value);
      mix(std::hash<std::string>{}(n.atom));
      mix(n.interval.lo);
      mix(n.interval.hi.value_or(~0ULL));
      mix(static_cast<std::size_t>(n.interval.lo_closed) << 1 | n.interval.hi_closed);
      mix(static_cast<std::size_t>(n.agg.cmp));
      mix(n.agg.bound);
      mix(n.agg.window);
      mix(n.agg.step);
      return h;
    }
  };

  static void check_step(std::uint64_t window, std::uint64_t step) {
    if (step == 0) throw std::invalid_argument("aggregate step h must be at least 1");
    if (window < step) throw std::invalid_argument("aggregate window K must be >= step h");
  }

  NodeId junction(Kind kind, std::vector<NodeId> fs) {
    if (fs.empty()) throw std::invalid_argument("empty conjunction/disjunction");
    std::sort(fs.begin(), fs.end());
    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    if (fs.size() == 1) return fs.front();
    return intern(Node{kind, std::move(fs), {}, {}, {}});
  }

  NodeId binary_temporal(Kind kind, const Interval& iv, NodeId lhs, NodeId rhs) {
    if (!iv.nonempty()) throw std::invalid_argument("empty interval " + iv.to_string());
    return intern(Node{kind, {lhs, rhs}, {}, iv, {}});
  }

  NodeId unary_temporal(Kind kind, const Interval& iv, NodeId f) {
    if (!iv.nonempty()) throw std::invalid_argument("empty interval " + iv.to_string());
    return intern(Node{kind, {f}, {}, iv, {}});
  }

  NodeId intern(Node n) {
    for (NodeId c : n.children)
      if (c.value >= nodes_.size()) throw std::out_of_range("child node id not in this pool");
    if (auto it = index_.find(n); it != index_.end()) return it->second;
    const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(n);
    index_.emplace(std::move(n), id);
    return id;
  }

  std::vector<Node> nodes_;
  std::unordered_map<Node, NodeId, NodeHash> index_;
};

}  // namespace solotrace
