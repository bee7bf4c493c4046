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
#include <atomic>
#include <chrono>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "solotrace/engine/mapper.hpp"
#include "solotrace/engine/reducers.hpp"
#include "solotrace/engine/shuffle.hpp"
#include "solotrace/engine/tuple.hpp"
#include "solotrace/formula_table.hpp"
#include "solotrace/holds.hpp"
#include "solotrace/trace.hpp"

namespace solotrace::engine {

struct EngineOptions {
  unsigned workers = 1;
  /// Receives every intermediate tuple as `<super>,<position>,<sub>`,
  /// preceded by a `# iteration <l>` line per iteration.
  std::ostream* dump_intermediate = nullptr;
  /// Receives the timestamp map as `<position>,<timestamp>` lines.
  std::ostream* dump_timestamps = nullptr;
  /// Fault injection for exercising the differential harness: drops the
  /// `τ ≥ K` guard of the aggregate reducers.
  bool drop_window_guard = false;
};

struct IterationMetrics {
  unsigned iteration = 0;
  std::size_t mapper_in = 0;
  std::size_t intermediate = 0;
  std::size_t reducer_out = 0;
  std::size_t reducer_slots = 0;
  /// Σ |sup_Φ(φ)| over mapper inputs, computed independently of map_lift.
  std::size_t expected_lifts = 0;
  double wall_ms = 0;
};

struct CheckResult {
  HoldsSet holds;
  bool verdict = false;  // root holds at position 1
  std::vector<IterationMetrics> iterations;
  std::vector<AlternationWarning> warnings;
  /// Per formula: largest window queue any of its reducer calls held.
  std::vector<std::size_t> peak_tracked;
  double wall_ms = 0;

  [[nodiscard]] std::size_t total_tuples() const {
    std::size_t n = 0;
    for (const auto& m : iterations) n += m.mapper_in;
    return n;
  }
};

namespace detail {

/// Runs tasks 0..n-1 on up to `workers` threads; workers <= 1 runs inline.
inline void run_tasks(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    const std::size_t threads = std::min<std::size_t>(workers, n);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Split {
  std::size_t begin;
  std::size_t end;
};

inline std::vector<Split> make_splits(std::size_t n, unsigned workers) {
  const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  std::vector<Split> out;
  for (std::size_t p = 0; p < parts; ++p) out.push_back({n * p / parts, n * (p + 1) / parts});
  return out;
}

}  // namespace detail

/// Checks `table`'s root over `trace` with h(Φ) map-shuffle-reduce
/// iterations. Iteration l finalizes every subformula of height l; its
/// output (new tuples plus re-emitted early ones) is the input of
/// iteration l + 1. The result holds the positions of every subformula.
inline CheckResult run_check(const Trace& trace, const FormulaTable& table, const EngineOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  for (std::uint32_t f = 0; f < table.size(); ++f)
    if (!is_core(table[FormulaId{f}].kind))
      throw std::invalid_argument("engine: connective '" + std::string(kind_name(table[FormulaId{f}].kind)) +
                                  "' must be rewritten first");
  if (trace.empty()) throw std::invalid_argument("engine: empty trace");

  const unsigned workers = std::max(1u, opts.workers);
  const Position H = static_cast<Position>(trace.size());
  CheckResult result;
  result.holds = HoldsSet(table.size());
  result.peak_tracked.assign(table.size(), 0);

  // Input readers: contiguous fragments of the trace, run in parallel.
  std::vector<Timestamp> ts_slots(H);
  std::vector<Tuple> input;
  {
    const AtomFilter atoms(trace, table);
    const auto splits = detail::make_splits(H, workers);
    std::vector<std::vector<Tuple>> parts(splits.size());
    detail::run_tasks(splits.size(), workers, [&](std::size_t s) {
      input_reader(trace, static_cast<Position>(splits[s].begin + 1), static_cast<Position>(splits[s].end), atoms,
                   ts_slots, parts[s]);
    });
    for (auto& p : parts) input.insert(input.end(), p.begin(), p.end());
  }
  const TimestampMap ts(std::move(ts_slots));
  if (opts.dump_timestamps)
    for (Position i = 1; i <= H; ++i) *opts.dump_timestamps << i << ',' << ts(i) << '\n';

  auto record = [&](const std::vector<Tuple>& tuples, unsigned height) {
    for (const Tuple& t : tuples)
      if (table.height(t.formula) == height) result.holds.push(t.formula, t.position);
  };
  std::sort(input.begin(), input.end());
  record(input, 0);

  for (unsigned l = 1; l <= table.height(); ++l) {
    const auto iter_start = clock::now();
    IterationMetrics m;
    m.iteration = l;
    m.mapper_in = input.size();
    for (const Tuple& t : input) m.expected_lifts += table[t.formula].supers.size();

    // Map.
    const auto splits = detail::make_splits(input.size(), workers);
    std::vector<std::vector<IntermediateTuple>> mapped(splits.size());
    detail::run_tasks(splits.size(), workers, [&](std::size_t s) {
      auto& out = mapped[s];
      for (std::size_t k = splits[s].begin; k < splits[s].end; ++k) map_lift(input[k], table, out);
    });
    std::vector<IntermediateTuple> intermediate;
    for (auto& part : mapped) {
      intermediate.insert(intermediate.end(), part.begin(), part.end());
      std::vector<IntermediateTuple>().swap(part);
    }
    std::vector<Tuple>().swap(input);
    m.intermediate = intermediate.size();

    if (opts.dump_intermediate) {
      auto sorted = intermediate;
      std::sort(sorted.begin(), sorted.end(), [](const IntermediateTuple& a, const IntermediateTuple& b) {
        return std::tie(a.key, a.value.formula) < std::tie(b.key, b.value.formula);
      });
      auto& os = *opts.dump_intermediate;
      os << "# iteration " << l << '\n';
      for (const auto& t : sorted) os << t.key.super.value << ',' << t.key.position << ',' << t.value.formula.value << '\n';
    }

    // Shuffle.
    const auto scheduled = table.at_height(l);
    auto slots = shuffle(std::move(intermediate), workers, scheduled);
    m.reducer_slots = slots.size();

    // Reduce: one task per slot; a group never spans slots.
    const ReduceContext ctx{table, ts, l, !opts.drop_window_guard};
    std::vector<ReduceOutput> outputs(slots.size());
    std::vector<std::vector<std::pair<FormulaId, std::size_t>>> peaks(slots.size());
    detail::run_tasks(slots.size(), workers, [&](std::size_t s) {
      for (const Group& g : slots[s].groups) {
        ReduceOutput out;
        reduce_group(ctx, g.super, slots[s].group_values(g), out);
        peaks[s].emplace_back(g.super, out.peak_tracked);
        auto& acc = outputs[s];
        acc.tuples.insert(acc.tuples.end(), out.tuples.begin(), out.tuples.end());
        acc.warnings.insert(acc.warnings.end(), out.warnings.begin(), out.warnings.end());
      }
    });

    // Merge into a deterministic, duplicate-free input for the next round;
    // several reducers may re-emit the same early tuple.
    for (std::size_t s = 0; s < slots.size(); ++s) {
      input.insert(input.end(), outputs[s].tuples.begin(), outputs[s].tuples.end());
      result.warnings.insert(result.warnings.end(), outputs[s].warnings.begin(), outputs[s].warnings.end());
      for (auto [f, peak] : peaks[s]) result.peak_tracked[f.value] = std::max(result.peak_tracked[f.value], peak);
    }
    slots.clear();
    std::sort(input.begin(), input.end());
    input.erase(std::unique(input.begin(), input.end()), input.end());
    m.reducer_out = input.size();
    record(input, l);
    m.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - iter_start).count();
    result.iterations.push_back(m);
  }

  normalize(result.warnings);
  result.verdict = result.holds.contains(table.root(), 1);
  result.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - started).count();
  return result;
}

}  // namespace solotrace::engine
