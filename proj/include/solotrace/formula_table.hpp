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
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "solotrace/formula.hpp"

namespace solotrace {

/// Dense id of a formula inside one FormulaTable. Ids are ordered by
/// height, so every child has a smaller id than its parents and the root
/// has the largest id.
struct FormulaId {
  std::uint32_t value = 0;
  friend auto operator<=>(const FormulaId&, const FormulaId&) = default;
};

struct TableEntry {
  Kind kind = Kind::Atom;
  std::vector<FormulaId> children;  // sub_d, in operand order
  std::vector<FormulaId> supers;    // sup_Φ, ascending
  unsigned height = 0;
  std::string atom;
  Interval interval;
  AggregateParams agg;
  std::string text;
};

/// The subformula lattice of a root formula: direct subformulae,
/// superformulae within the root, and heights. Immutable once built.
class FormulaTable {
 public:
  [[nodiscard]] FormulaId root() const noexcept { return FormulaId{static_cast<std::uint32_t>(entries_.size() - 1)}; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] const TableEntry& operator[](FormulaId id) const { return entries_.at(id.value); }

  [[nodiscard]] unsigned height(FormulaId id) const { return (*this)[id].height; }
  [[nodiscard]] unsigned height() const { return height(root()); }
  [[nodiscard]] std::span<const FormulaId> direct_subformulae(FormulaId id) const { return (*this)[id].children; }
  [[nodiscard]] std::span<const FormulaId> superformulae(FormulaId id) const { return (*this)[id].supers; }
  [[nodiscard]] const std::string& text(FormulaId id) const { return (*this)[id].text; }

  /// sub(Φ): every subformula except the root itself.
  [[nodiscard]] std::vector<FormulaId> subformulae() const {
    std::vector<FormulaId> out;
    for (std::uint32_t i = 0; i + 1 < entries_.size(); ++i) out.push_back(FormulaId{i});
    return out;
  }

  /// sub_a(Φ): the height-0 formulae, including the true/false
  /// pseudo-atoms when they occur.
  [[nodiscard]] const std::vector<FormulaId>& atoms() const noexcept { return atoms_; }

  [[nodiscard]] std::optional<FormulaId> find_atom(std::string_view name) const {
    if (auto it = atom_index_.find(std::string(name)); it != atom_index_.end()) return it->second;
    return std::nullopt;
  }
  [[nodiscard]] std::optional<FormulaId> truth() const noexcept { return truth_; }

  [[nodiscard]] std::vector<FormulaId> at_height(unsigned h) const {
    std::vector<FormulaId> out;
    for (std::uint32_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].height == h) out.push_back(FormulaId{i});
    return out;
  }

  [[nodiscard]] std::optional<FormulaId> find(std::string_view text) const {
    for (std::uint32_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].text == text) return FormulaId{i};
    return std::nullopt;
  }

  friend FormulaTable build_table(const FormulaPool& pool, NodeId root, bool allow_surface);

 private:
  std::vector<TableEntry> entries_;
  std::vector<FormulaId> atoms_;
  std::unordered_map<std::string, FormulaId> atom_index_;
  std::optional<FormulaId> truth_;
};

/// Builds the lattice of `root`. Throws std::invalid_argument if a surface
/// form survived (run rewrite_derived first). `allow_surface` admits them
/// for the oracle, which evaluates every connective directly.
inline FormulaTable build_table(const FormulaPool& pool, NodeId root, bool allow_surface = false) {
  // post-order over distinct nodes
  std::vector<NodeId> order;
  std::unordered_map<std::uint32_t, unsigned> height;
  auto visit = [&](auto&& self, NodeId id) -> unsigned {
    if (auto it = height.find(id.value); it != height.end()) return it->second;
    const Node& n = pool[id];
    if (!is_core(n.kind) && !allow_surface)
      throw std::invalid_argument("build_table: surface connective '" + std::string(kind_name(n.kind)) +
                                  "' must be rewritten first");
    unsigned h = 0;
    for (NodeId c : n.children) h = std::max(h, self(self, c) + 1);
    height.emplace(id.value, h);
    order.push_back(id);
    return h;
  };
  visit(visit, root);
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return height.at(a.value) < height.at(b.value); });

  FormulaTable t;
  std::unordered_map<std::uint32_t, FormulaId> local;
  for (NodeId id : order) local.emplace(id.value, FormulaId{static_cast<std::uint32_t>(local.size())});

  t.entries_.reserve(order.size());
  for (NodeId id : order) {
    const Node& n = pool[id];
    TableEntry e;
    e.kind = n.kind;
    e.height = height.at(id.value);
    e.atom = n.atom;
    e.interval = n.interval;
    e.agg = n.agg;
    e.text = pool.to_string(id);
    for (NodeId c : n.children) e.children.push_back(local.at(c.value));
    t.entries_.push_back(std::move(e));
  }
  for (std::uint32_t i = 0; i < t.entries_.size(); ++i) {
    std::vector<FormulaId> kids = t.entries_[i].children;
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    for (FormulaId c : kids) t.entries_[c.value].supers.push_back(FormulaId{i});
    const Kind k = t.entries_[i].kind;
    if (is_leaf(k)) {
      t.atoms_.push_back(FormulaId{i});
      if (k == Kind::Atom) t.atom_index_.emplace(t.entries_[i].atom, FormulaId{i});
      if (k == Kind::True) t.truth_ = FormulaId{i};
    }
  }
  return t;
}

}  // namespace solotrace
