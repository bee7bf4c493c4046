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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "solotrace/formula_table.hpp"
#include "solotrace/types.hpp"

namespace solotrace {

/// For every formula of a table, the ascending positions where it holds.
class HoldsSet {
 public:
  HoldsSet() = default;
  explicit HoldsSet(std::size_t formulae) : sets_(formulae) {}

  [[nodiscard]] std::size_t size() const noexcept { return sets_.size(); }
  [[nodiscard]] std::span<const Position> positions(FormulaId f) const { return sets_.at(f.value); }
  [[nodiscard]] bool contains(FormulaId f, Position i) const {
    const auto& s = sets_.at(f.value);
    return std::binary_search(s.begin(), s.end(), i);
  }

  /// Replaces the set of `f`; input is sorted and deduplicated.
  void assign(FormulaId f, std::vector<Position> ps) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    sets_.at(f.value) = std::move(ps);
  }

  /// Appends a position; callers must append in ascending order.
  void push(FormulaId f, Position i) { sets_.at(f.value).push_back(i); }

  friend bool operator==(const HoldsSet&, const HoldsSet&) = default;

 private:
  std::vector<std::vector<Position>> sets_;
};

/// Non-alternation of the two arguments of an average-distance modality:
/// either one end event was matched by two start events inside a window,
/// or start and end hold at the same position.
struct AlternationWarning {
  FormulaId formula;
  Position position = 0;
  friend auto operator<=>(const AlternationWarning&, const AlternationWarning&) = default;
};

inline void normalize(std::vector<AlternationWarning>& ws) {
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
}

/// Writes `<formula-id>,<position>` lines ordered by (id, position).
inline void write_holds(std::ostream& out, const HoldsSet& holds) {
  std::string buf;
  for (std::uint32_t f = 0; f < holds.size(); ++f) {
    for (Position i : holds.positions(FormulaId{f})) {
      buf += std::to_string(f);
      buf += ',';
      buf += std::to_string(i);
      buf += '\n';
    }
    out << buf;
    buf.clear();
  }
}

}  // namespace solotrace
