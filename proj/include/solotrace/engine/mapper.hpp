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
#include <optional>
#include <span>
#include <vector>

#include "solotrace/engine/tuple.hpp"
#include "solotrace/formula_table.hpp"
#include "solotrace/trace.hpp"

namespace solotrace::engine {

/// Maps trace symbols to table atoms once per run, so the input reader
/// does not compare strings per event.
class AtomFilter {
 public:
  AtomFilter(const Trace& trace, const FormulaTable& table) : truth_(table.truth()) {
    by_symbol_.resize(trace.symbol_count());
    for (SymbolId s = 0; s < trace.symbol_count(); ++s) by_symbol_[s] = table.find_atom(trace.symbol_name(s));
  }

  [[nodiscard]] std::optional<FormulaId> operator()(SymbolId s) const { return by_symbol_[s]; }
  [[nodiscard]] std::optional<FormulaId> truth() const noexcept { return truth_; }

 private:
  std::vector<std::optional<FormulaId>> by_symbol_;
  std::optional<FormulaId> truth_;
};

/// First-iteration input reader over the contiguous fragment
/// [first, last] of the trace. Records TS(i) into `ts_slots` (indexed by
/// i - 1, disjoint per fragment) and emits (a, i) for every atom a of the
/// entry that occurs in the formula, plus (⊤, i) when ⊤ occurs. Other
/// atoms are dropped; ⊥ is never emitted.
inline void input_reader(const Trace& trace, Position first, Position last, const AtomFilter& atoms,
                         std::span<Timestamp> ts_slots, std::vector<Tuple>& out) {
  for (Position i = first; i <= last; ++i) {
    ts_slots[i - 1] = trace.timestamp(i);
    const std::size_t mark = out.size();
    for (SymbolId s : trace.atoms(i))
      if (auto f = atoms(s)) out.push_back({*f, i});
    if (auto top = atoms.truth()) out.push_back({*top, i});
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(mark), out.end());
  }
}

/// Lifts (φ, i) to ((ψ, i), (φ, i)) for every ψ in sup_Φ(φ). Returns the
/// number of intermediate tuples written; a tuple of the root itself is
/// not lifted and is reported through `root_out` instead.
inline std::size_t map_lift(const Tuple& t, const FormulaTable& table, std::vector<IntermediateTuple>& out,
                            std::vector<Tuple>* root_out = nullptr) {
  if (t.formula == table.root()) {
    if (root_out) root_out->push_back(t);
    return 0;
  }
  const auto supers = table.superformulae(t.formula);
  for (FormulaId psi : supers) out.push_back({{psi, t.position}, t});
  return supers.size();
}

}  // namespace solotrace::engine
