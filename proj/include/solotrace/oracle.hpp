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

// Reference evaluator: a literal transcription of the satisfaction
// relation, quantifying over trace positions 1..H only. Quadratic or worse
// in the trace length; it exists to be obviously right, not fast.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "solotrace/formula_table.hpp"
#include "solotrace/holds.hpp"
#include "solotrace/trace.hpp"

namespace solotrace::oracle {

using Pair = std::pair<Position, Position>;

namespace detail {

// c(a, b, φ) over an arbitrary predicate.
template <class Pred>
std::uint64_t count_in(const Trace& t, Pred&& holds, Timestamp a, Timestamp b) {
  std::uint64_t c = 0;
  for (Position s = 1; s <= t.size(); ++s) {
    const Timestamp ts = t.timestamp(s);
    if (a < ts && ts <= b && holds(s)) ++c;
  }
  return c;
}

// d(φ, ψ, τ_i, K) over arbitrary predicates.
template <class P, class Q>
std::vector<Pair> pairs_in(const Trace& t, P&& phi, Q&& psi, Timestamp tau_i, Timestamp K) {
  std::vector<Pair> out;
  for (Position s = 1; s <= t.size(); ++s) {
    const Timestamp ts = t.timestamp(s);
    if (!(tau_i - K < ts && ts <= tau_i) || !phi(s)) continue;
    for (Position u = 1; u <= t.size(); ++u) {
      const Timestamp tu = t.timestamp(u);
      if (ts < tu && tu <= tau_i && psi(u)) {
        out.emplace_back(s, u);
        break;  // positions ascend with timestamps: first hit is the minimum
      }
    }
  }
  return out;
}

// One clause of the satisfaction relation, with children looked up
// through `sub(child, position)`.
template <class Sub>
bool evaluate(const Trace& t, const FormulaTable& table, FormulaId f, Position i, Sub&& sub) {
  const TableEntry& e = table[f];
  const Position H = static_cast<Position>(t.size());
  const Timestamp tau_i = t.timestamp(i);
  auto child = [&](std::size_t k) { return [&, c = e.children[k]](Position p) { return sub(c, p); }; };
  const auto K = static_cast<Timestamp>(e.agg.window);

  switch (e.kind) {
    case Kind::Atom:
      return t.holds(i, e.atom);
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Not:
      return !sub(e.children[0], i);
    case Kind::And:
      return std::all_of(e.children.begin(), e.children.end(), [&](FormulaId c) { return sub(c, i); });
    case Kind::Or:
      return std::any_of(e.children.begin(), e.children.end(), [&](FormulaId c) { return sub(c, i); });
    case Kind::Until:
      for (Position j = i + 1; j <= H; ++j) {
        if (!e.interval.contains(t.timestamp(j) - tau_i) || !sub(e.children[1], j)) continue;
        bool all = true;
        for (Position k = i + 1; k < j && all; ++k) all = sub(e.children[0], k);
        if (all) return true;
      }
      return false;
    case Kind::Since:
      for (Position j = 1; j < i; ++j) {
        if (!e.interval.contains(tau_i - t.timestamp(j)) || !sub(e.children[1], j)) continue;
        bool all = true;
        for (Position k = j + 1; k < i && all; ++k) all = sub(e.children[0], k);
        if (all) return true;
      }
      return false;
    case Kind::Always:
      for (Position j = i + 1; j <= H; ++j)
        if (e.interval.contains(t.timestamp(j) - tau_i) && !sub(e.children[0], j)) return false;
      return true;
    case Kind::Historically:
      for (Position j = 1; j < i; ++j)
        if (e.interval.contains(tau_i - t.timestamp(j)) && !sub(e.children[0], j)) return false;
      return true;
    case Kind::Eventually:
      for (Position j = i + 1; j <= H; ++j)
        if (e.interval.contains(t.timestamp(j) - tau_i) && sub(e.children[0], j)) return true;
      return false;
    case Kind::Once:
      for (Position j = 1; j < i; ++j)
        if (e.interval.contains(tau_i - t.timestamp(j)) && sub(e.children[0], j)) return true;
      return false;
    case Kind::Next:
      return i < H && e.interval.contains(t.timestamp(i + 1) - tau_i) && sub(e.children[0], i + 1);
    case Kind::Yesterday:
      return i > 1 && e.interval.contains(tau_i - t.timestamp(i - 1)) && sub(e.children[0], i - 1);
    case Kind::Count: {
      if (tau_i < K) return false;
      const auto c = count_in(t, child(0), tau_i - K, tau_i);
      return compare(e.agg.cmp, c, e.agg.bound);
    }
    case Kind::AvgCount: {
      if (tau_i < K) return false;
      const std::uint64_t q = e.agg.window / e.agg.step;
      const auto c = count_in(t, child(0), tau_i - static_cast<Timestamp>(q * e.agg.step), tau_i);
      // c / q ⋈ n, compared exactly
      return compare(e.agg.cmp, c, e.agg.bound * q);
    }
    case Kind::MaxCount: {
      if (tau_i < K) return false;
      const auto h = static_cast<Timestamp>(e.agg.step);
      std::uint64_t best = 0;
      for (Timestamp m = 0; m <= K / h; ++m) {
        const Timestamp lb = std::max(tau_i - K, tau_i - (m + 1) * h);
        const Timestamp rb = tau_i - m * h;
        best = std::max(best, count_in(t, child(0), lb, rb));
      }
      return compare(e.agg.cmp, best, e.agg.bound);
    }
    case Kind::AvgDist: {
      if (tau_i < K) return false;
      const auto d = pairs_in(t, child(0), child(1), tau_i, K);
      if (d.empty()) return false;
      Timestamp dist = 0;
      for (auto [s, u] : d) dist += t.timestamp(u) - t.timestamp(s);
      return compare(e.agg.cmp, static_cast<std::uint64_t>(dist), e.agg.bound * d.size());
    }
    default:
      throw std::invalid_argument("oracle: unsupported connective '" + std::string(kind_name(e.kind)) + "'");
  }
}

}  // namespace detail

/// c(τ_a, τ_b, φ) = |{s : τ_a < τ_s ≤ τ_b, s ∈ holds(φ)}|.
inline std::uint64_t count_occurrences(const Trace& t, const HoldsSet& holds, FormulaId phi, Timestamp tau_a,
                                       Timestamp tau_b) {
  return detail::count_in(t, [&](Position s) { return holds.contains(phi, s); }, tau_a, tau_b);
}

/// d(φ, ψ, τ_i, K): each φ-position in (τ_i − K, τ_i] paired with the
/// first later ψ-position not after τ_i. Unmatched φ-positions are absent.
inline std::vector<Pair> matching_pairs(const Trace& t, const HoldsSet& holds, FormulaId phi, FormulaId psi,
                                        Timestamp tau_i, Timestamp K) {
  return detail::pairs_in(
      t, [&](Position s) { return holds.contains(phi, s); }, [&](Position u) { return holds.contains(psi, u); },
      tau_i, K);
}

/// Truth of `f` at position `i`, computed top-down with memoisation.
inline bool eval_at(const Trace& t, const FormulaTable& table, FormulaId f, Position i) {
  std::map<std::pair<std::uint32_t, Position>, bool> memo;
  auto go = [&](auto&& self, FormulaId g, Position p) -> bool {
    const auto key = std::make_pair(g.value, p);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const bool v = detail::evaluate(t, table, g, p, [&](FormulaId c, Position q) { return self(self, c, q); });
    memo.emplace(key, v);
    return v;
  };
  return go(go, f, i);
}

struct Evaluation {
  HoldsSet holds;
  std::vector<AlternationWarning> warnings;
};

/// Holds-sets of every formula of the table, bottom-up over the lattice.
inline Evaluation eval_positions(const Trace& t, const FormulaTable& table) {
  const Position H = static_cast<Position>(t.size());
  std::vector<std::vector<char>> truth(table.size(), std::vector<char>(H + 1, 0));
  auto sub = [&](FormulaId c, Position p) { return truth[c.value][p] != 0; };

  Evaluation out{HoldsSet(table.size()), {}};
  for (std::uint32_t f = 0; f < table.size(); ++f) {
    const FormulaId id{f};
    for (Position i = 1; i <= H; ++i) {
      truth[f][i] = detail::evaluate(t, table, id, i, sub);
      if (truth[f][i]) out.holds.push(id, i);
    }
    const TableEntry& e = table[id];
    if (e.kind != Kind::AvgDist) continue;
    const FormulaId start = e.children[0], end = e.children[1];
    const auto K = static_cast<Timestamp>(e.agg.window);
    for (Position s = 1; s <= H; ++s)
      if (sub(start, s) && sub(end, s)) out.warnings.push_back({id, s});
    for (Position j = 1; j <= H; ++j) {
      const auto d = detail::pairs_in(
          t, [&](Position s) { return sub(start, s); }, [&](Position u) { return sub(end, u); }, t.timestamp(j), K);
      for (std::size_t a = 0; a < d.size(); ++a)
        for (std::size_t b = a + 1; b < d.size(); ++b)
          if (d[a].second == d[b].second) out.warnings.push_back({id, d[a].second});
    }
  }
  normalize(out.warnings);
  return out;
}

}  // namespace solotrace::oracle
