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

// Reduce functions, one per connective. Each receives the values of one
// superformula ψ sorted by position and emits (ψ, j) for exactly the
// positions where ψ holds. The temporal and aggregate reducers sweep every
// position 1..H, including positions for which no tuple arrived, and keep
// only the positions that can still matter in a queue bounded by the
// operator's time window.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "solotrace/engine/tuple.hpp"
#include "solotrace/formula_table.hpp"
#include "solotrace/holds.hpp"
#include "solotrace/trace.hpp"

namespace solotrace::engine {

struct ReduceContext {
  const FormulaTable& table;
  const TimestampMap& ts;
  unsigned iteration = 1;
  /// Enforce `τ_j ≥ K` on aggregates. Only the differential-testing fault
  /// injection turns this off.
  bool window_guard = true;
};

struct ReduceOutput {
  std::vector<Tuple> tuples;
  std::vector<AlternationWarning> warnings;
  /// Largest number of positions a window queue held during the last call.
  std::size_t peak_tracked = 0;

  void emit(FormulaId f, Position i) { tuples.push_back({f, i}); }
  void track(std::size_t n) { peak_tracked = std::max(peak_tracked, n); }
};

namespace detail {

/// Walks the sorted values in step with an ascending position sweep and
/// reports which of (at most) two children hold at the current position.
class ChildCursor {
 public:
  struct Hit {
    bool first = false;
    bool second = false;
  };

  ChildCursor(std::span<const Tuple> values, FormulaId first, FormulaId second)
      : values_(values), first_(first), second_(second) {}

  Hit at(Position j) {
    Hit h;
    while (k_ < values_.size() && values_[k_].position < j) ++k_;
    for (; k_ < values_.size() && values_[k_].position == j; ++k_) {
      h.first |= values_[k_].formula == first_;
      h.second |= values_[k_].formula == second_;
    }
    return h;
  }

 private:
  std::span<const Tuple> values_;
  FormulaId first_;
  FormulaId second_;
  std::size_t k_ = 0;
};

inline const TableEntry& expect_kind(const ReduceContext& ctx, FormulaId psi, Kind k) {
  const TableEntry& e = ctx.table[psi];
  if (e.kind != k)
    throw std::logic_error("reducer for '" + std::string(kind_name(k)) + "' applied to '" +
                           std::string(kind_name(e.kind)) + "'");
  return e;
}

}  // namespace detail

/// ¬φ holds at every position 1..H that does not appear in the values.
inline void reduce_negation(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                            ReduceOutput& out) {
  detail::expect_kind(ctx, psi, Kind::Not);
  Position p = 0;
  for (const Tuple& t : values) {
    for (Position j = p + 1; j < t.position; ++j) out.emit(psi, j);
    p = std::max(p, t.position);
  }
  for (Position j = p + 1; j <= ctx.ts.size(); ++j) out.emit(psi, j);
}

/// n-ary ∧: a position holds when its run of equal positions is as long as
/// the number of conjuncts.
inline void reduce_conjunction(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                               ReduceOutput& out) {
  const std::size_t arity = detail::expect_kind(ctx, psi, Kind::And).children.size();
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j].position == values[i].position) ++j;
    if (j - i == arity) out.emit(psi, values[i].position);
    i = j;
  }
}

/// n-ary ∨: every distinct position holds.
inline void reduce_disjunction(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                               ReduceOutput& out) {
  detail::expect_kind(ctx, psi, Kind::Or);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i == 0 || values[i].position != values[i - 1].position) out.emit(psi, values[i].position);
}

/// φ₁ U_I φ₂. `pending` holds every position z whose future is still
/// open: φ₁ held at all positions after z seen so far and τ_j − τ_z has
/// not yet passed the upper bound of I. Entries leave the queue when the
/// window closes (MTL condition), when φ₁ fails (LTL condition), or when a
/// φ₂ position at distance in I proves them.
inline void reduce_until(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                         ReduceOutput& out) {
  const TableEntry& e = detail::expect_kind(ctx, psi, Kind::Until);
  const Interval& iv = e.interval;
  const auto& ts = ctx.ts;
  detail::ChildCursor cursor(values, e.children[0], e.children[1]);
  std::deque<Position> pending;
  for (Position j = 1; j <= ts.size(); ++j) {
    const auto hit = cursor.at(j);
    const Timestamp now = ts(j);
    while (!pending.empty() && !iv.below_upper(now - ts(pending.front()))) pending.pop_front();
    if (hit.second) {
      // distances shrink towards the back, so the ones inside I are a prefix
      while (!pending.empty() && iv.above_lower(now - ts(pending.front()))) {
        out.emit(psi, pending.front());
        pending.pop_front();
      }
    }
    if (!hit.first) pending.clear();
    pending.push_back(j);
    out.track(pending.size());
  }
}

/// φ₁ S_I φ₂, swept forwards. `witnesses` are φ₂ positions w with φ₁ at
/// every position after w so far and τ_j − τ_w within the upper bound.
inline void reduce_since(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                         ReduceOutput& out) {
  const TableEntry& e = detail::expect_kind(ctx, psi, Kind::Since);
  const Interval& iv = e.interval;
  const auto& ts = ctx.ts;
  detail::ChildCursor cursor(values, e.children[0], e.children[1]);
  std::deque<Position> witnesses;
  for (Position j = 1; j <= ts.size(); ++j) {
    const auto hit = cursor.at(j);
    const Timestamp now = ts(j);
    while (!witnesses.empty() && !iv.below_upper(now - ts(witnesses.front()))) witnesses.pop_front();
    out.track(witnesses.size());
    if (!witnesses.empty() && iv.above_lower(now - ts(witnesses.front()))) out.emit(psi, j);
    if (!hit.first) witnesses.clear();
    if (hit.second) witnesses.push_back(j);
  }
}

/// G_I φ: a position z holds unless some later j with τ_j − τ_z ∈ I
/// violates φ. Candidates are confirmed once the window has passed or the
/// trace ends.
inline void reduce_always(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                          ReduceOutput& out) {
  const TableEntry& e = detail::expect_kind(ctx, psi, Kind::Always);
  const Interval& iv = e.interval;
  const auto& ts = ctx.ts;
  detail::ChildCursor cursor(values, e.children[0], e.children[0]);
  std::deque<Position> pending;
  for (Position j = 1; j <= ts.size(); ++j) {
    const auto hit = cursor.at(j);
    const Timestamp now = ts(j);
    while (!pending.empty() && !iv.below_upper(now - ts(pending.front()))) {
      out.emit(psi, pending.front());
      pending.pop_front();
    }
    if (!hit.first)
      while (!pending.empty() && iv.above_lower(now - ts(pending.front()))) pending.pop_front();
    pending.push_back(j);
    out.track(pending.size());
  }
  for (Position z : pending) out.emit(psi, z);
}

/// H_I φ: a position holds unless an earlier violation of φ lies at a
/// distance in I. Only violations still within the upper bound are kept.
inline void reduce_historically(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                                ReduceOutput& out) {
  const TableEntry& e = detail::expect_kind(ctx, psi, Kind::Historically);
  const Interval& iv = e.interval;
  const auto& ts = ctx.ts;
  detail::ChildCursor cursor(values, e.children[0], e.children[0]);
  std::deque<Position> violations;
  for (Position j = 1; j <= ts.size(); ++j) {
    const auto hit = cursor.at(j);
    const Timestamp now = ts(j);
    while (!violations.empty() && !iv.below_upper(now - ts(violations.front()))) violations.pop_front();
    out.track(violations.size());
    if (violations.empty() || !iv.above_lower(now - ts(violations.front()))) out.emit(psi, j);
    if (!hit.first) violations.push_back(j);
  }
}

/// C^K_{⋈n}(φ): the queue holds the φ positions in (τ_j − K, τ_j].
inline void reduce_count(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values,
                         ReduceOutput& out) {
  const TableEntry& e = detail::expect_kind(ctx, psi, Kind::Count);
  const auto K = static_cast<Timestamp>(e.agg.window);
  const auto& ts = ctx.ts;
  detail::ChildCursor cursor(values, e.children[0], e.children[0]);
  std::deque<Position> window;
  for (Position j = 1; j <= ts.size(); ++j) {
    const Timestamp now = ts(j);
    if (cursor.at(j).first) window.push_back(j);
    while (!window.empty() && ts(window.front()) <= now - K) window.pop_front();
    out.track(window.size());
    if ((now >= K || !ctx.window_guard) && compare<std::uint64_t>(e.agg.cmp, window.size(), e.agg.bound))
      out.emit(psi, j);
  }
}

/// M^{K,h}_{⋈n}(φ): same window as the count reducer; the occurrences are
/// bucketed into the right-aligned subintervals of length h (the tail
/// interval included) and the largest bucket is compared with n.
inline void reduce_max(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values, ReduceOutput& out) {
  const TableEntry& e = detail::expect_kind(ctx, psi, Kind::MaxCount);
  const auto K = static_cast<Timestamp>(e.agg.window);
  const auto h = static_cast<Timestamp>(e.agg.step);
  const auto& ts = ctx.ts;
  detail::ChildCursor cursor(values, e.children[0], e.children[0]);
  std::deque<Position> window;
  for (Position j = 1; j <= ts.size(); ++j) {
    const Timestamp now = ts(j);
    if (cursor.at(j).first) window.push_back(j);
    while (!window.empty() && ts(window.front()) <= now - K) window.pop_front();
    out.track(window.size());
    if (now < K && ctx.window_guard) continue;
    // newest first: bucket indices are non-decreasing
    std::uint64_t best = 0, run = 0;
    Timestamp bucket = -1;
    for (auto it = window.rbegin(); it != window.rend(); ++it) {
      const Timestamp m = (now - ts(*it)) / h;
      run = m == bucket ? run + 1 : 1;
      bucket = m;
      best = std::max(best, run);
    }
    if (compare(e.agg.cmp, best, e.agg.bound)) out.emit(psi, j);
  }
}

/// D^K_{⋈n}(φ, χ): the queue holds the φ positions in (τ_j − K, τ_j], each
/// matched to the first later χ position once one arrives. The unmatched
/// ones always form a suffix of the queue. `pairs` and `dist` are kept
/// incrementally; the average is compared exactly as dist ⋈ n·pairs.
inline void reduce_dist(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values, ReduceOutput& out) {
  const TableEntry& e = detail::expect_kind(ctx, psi, Kind::AvgDist);
  const auto K = static_cast<Timestamp>(e.agg.window);
  const auto& ts = ctx.ts;
  struct Occurrence {
    Position start;
    Position end;  // 0 while unmatched
  };
  detail::ChildCursor cursor(values, e.children[0], e.children[1]);
  std::deque<Occurrence> window;
  std::size_t unmatched = 0;
  std::uint64_t pairs = 0;
  std::uint64_t dist = 0;
  for (Position j = 1; j <= ts.size(); ++j) {
    const auto hit = cursor.at(j);
    const Timestamp now = ts(j);
    while (!window.empty() && ts(window.front().start) <= now - K) {
      const Occurrence& o = window.front();
      if (o.end) {
        --pairs;
        dist -= static_cast<std::uint64_t>(ts(o.end) - ts(o.start));
      } else {
        --unmatched;
      }
      window.pop_front();
    }
    if (hit.second) {
      if (unmatched >= 2) out.warnings.push_back({psi, j});
      for (std::size_t k = window.size() - unmatched; k < window.size(); ++k) {
        window[k].end = j;
        ++pairs;
        dist += static_cast<std::uint64_t>(now - ts(window[k].start));
      }
      unmatched = 0;
    }
    if (hit.first && hit.second) out.warnings.push_back({psi, j});
    if (hit.first) {
      window.push_back({j, 0});
      ++unmatched;
    }
    out.track(window.size());
    if ((now >= K || !ctx.window_guard) && pairs > 0 && compare(e.agg.cmp, dist, e.agg.bound * pairs))
      out.emit(psi, j);
  }
}

/// Dispatches one group. A superformula of the current height is
/// evaluated; one of a greater height got some of its tuples early and
/// re-emits them unchanged; one of a smaller height was finalized in an
/// earlier iteration and its (re-lifted) tuples are dropped.
inline void reduce_group(const ReduceContext& ctx, FormulaId psi, std::span<const Tuple> values, ReduceOutput& out) {
  const unsigned h = ctx.table.height(psi);
  if (h < ctx.iteration) return;
  if (h > ctx.iteration) {
    out.tuples.insert(out.tuples.end(), values.begin(), values.end());
    return;
  }
  switch (ctx.table[psi].kind) {
    case Kind::Not: return reduce_negation(ctx, psi, values, out);
    case Kind::And: return reduce_conjunction(ctx, psi, values, out);
    case Kind::Or: return reduce_disjunction(ctx, psi, values, out);
    case Kind::Until: return reduce_until(ctx, psi, values, out);
    case Kind::Since: return reduce_since(ctx, psi, values, out);
    case Kind::Always: return reduce_always(ctx, psi, values, out);
    case Kind::Historically: return reduce_historically(ctx, psi, values, out);
    case Kind::Count: return reduce_count(ctx, psi, values, out);
    case Kind::MaxCount: return reduce_max(ctx, psi, values, out);
    case Kind::AvgDist: return reduce_dist(ctx, psi, values, out);
    default:
      throw std::logic_error("no reducer for '" + std::string(kind_name(ctx.table[psi].kind)) + "'");
  }
}

}  // namespace solotrace::engine
