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
#include <span>
#include <vector>

#include "solotrace/engine/tuple.hpp"

namespace solotrace::engine {

/// Reducer slot for a superformula: a fixed integer mix of the id modulo
/// the slot count, identical on every platform.
inline std::size_t partition(FormulaId super, std::size_t slots) noexcept {
  std::uint64_t x = super.value + 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return static_cast<std::size_t>(x % slots);
}

/// All values of one superformula, ascending by position.
struct Group {
  FormulaId super;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct ReducerSlot {
  std::vector<Tuple> values;
  std::vector<Group> groups;  // ascending superformula id

  [[nodiscard]] std::span<const Tuple> group_values(const Group& g) const {
    return std::span<const Tuple>(values).subspan(g.begin, g.end - g.begin);
  }
};

/// Shuffle and sort. Tuples are grouped by superformula and every group is
/// sent whole to one of min(groups, workers) slots. Inside a slot tuples
/// are stably sorted by composite key, so each group's values ascend by
/// position and ties keep their input order.
///
/// `scheduled` names superformulae that must get a group even when no
/// tuple arrives for them (a negation of a formula that never holds still
/// has work to do).
inline std::vector<ReducerSlot> shuffle(std::vector<IntermediateTuple> tuples, std::size_t workers,
                                        std::span<const FormulaId> scheduled = {}) {
  std::vector<FormulaId> keys;
  keys.reserve(tuples.size() + scheduled.size());
  for (const auto& t : tuples) keys.push_back(t.key.super);
  keys.insert(keys.end(), scheduled.begin(), scheduled.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  if (keys.empty()) return {};

  const std::size_t slot_count = std::max<std::size_t>(1, std::min(keys.size(), workers));
  std::vector<std::vector<IntermediateTuple>> buckets(slot_count);
  for (auto& t : tuples) buckets[partition(t.key.super, slot_count)].push_back(t);
  tuples.clear();
  tuples.shrink_to_fit();

  std::vector<ReducerSlot> slots(slot_count);
  for (std::size_t s = 0; s < slot_count; ++s) {
    auto& bucket = buckets[s];
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const IntermediateTuple& a, const IntermediateTuple& b) { return a.key < b.key; });
    ReducerSlot& slot = slots[s];
    slot.values.reserve(bucket.size());
    std::size_t k = 0;
    for (FormulaId super : keys) {
      if (partition(super, slot_count) != s) continue;
      Group g{super, slot.values.size(), slot.values.size()};
      while (k < bucket.size() && bucket[k].key.super == super) slot.values.push_back(bucket[k++].value);
      g.end = slot.values.size();
      slot.groups.push_back(g);
    }
    std::vector<IntermediateTuple>().swap(bucket);
  }
  return slots;
}

}  // namespace solotrace::engine
