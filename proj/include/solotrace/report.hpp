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

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "solotrace/engine/driver.hpp"
#include "solotrace/formula_table.hpp"
#include "solotrace/holds.hpp"

namespace solotrace {

struct CheckReport {
  std::string mode;  // "engine" or "oracle"
  bool verdict = false;
  std::string formula;
  unsigned height = 0;
  std::size_t trace_length = 0;
  std::vector<std::string> subformulae;  // by formula id
  std::vector<std::size_t> holds_sizes;  // by formula id
  std::vector<engine::IterationMetrics> iterations;
  std::size_t total_tuples = 0;
  std::size_t warnings = 0;
  double wall_ms = 0;

  /// Wall time per time instant, in microseconds.
  [[nodiscard]] double per_event_us() const {
    return trace_length ? wall_ms * 1000.0 / static_cast<double>(trace_length) : 0.0;
  }
};

inline CheckReport make_report(std::string mode, const FormulaTable& table, const HoldsSet& holds,
                               std::size_t trace_length, double wall_ms) {
  CheckReport r;
  r.mode = std::move(mode);
  r.verdict = holds.contains(table.root(), 1);
  r.formula = table.text(table.root());
  r.height = table.height();
  r.trace_length = trace_length;
  for (std::uint32_t f = 0; f < table.size(); ++f) {
    r.subformulae.push_back(table.text(FormulaId{f}));
    r.holds_sizes.push_back(holds.positions(FormulaId{f}).size());
  }
  r.wall_ms = wall_ms;
  return r;
}

inline CheckReport make_report(const FormulaTable& table, const engine::CheckResult& result,
                               std::size_t trace_length) {
  CheckReport r = make_report("engine", table, result.holds, trace_length, result.wall_ms);
  r.iterations = result.iterations;
  r.total_tuples = result.total_tuples();
  r.warnings = result.warnings.size();
  return r;
}

/// One `key=value` per line. Every field except the wall times depends
/// only on the inputs.
inline void write_report(std::ostream& out, const CheckReport& r) {
  out << "mode=" << r.mode << '\n';
  out << "verdict=" << (r.verdict ? "true" : "false") << '\n';
  out << "formula=" << r.formula << '\n';
  out << "height=" << r.height << '\n';
  out << "trace_length=" << r.trace_length << '\n';
  for (std::size_t f = 0; f < r.subformulae.size(); ++f) {
    out << "subformula." << f << '=' << r.subformulae[f] << '\n';
    out << "holds." << f << '=' << r.holds_sizes[f] << '\n';
  }
  out << "iterations=" << r.iterations.size() << '\n';
  for (const auto& m : r.iterations) {
    const std::string p = "iteration." + std::to_string(m.iteration) + ".";
    out << p << "mapper_in=" << m.mapper_in << '\n';
    out << p << "intermediate=" << m.intermediate << '\n';
    out << p << "reducer_out=" << m.reducer_out << '\n';
    out << p << "wall_ms=" << m.wall_ms << '\n';
  }
  out << "total_tuples=" << r.total_tuples << '\n';
  out << "warnings=" << r.warnings << '\n';
  out << "wall_ms=" << r.wall_ms << '\n';
  out << "per_event_us=" << r.per_event_us() << '\n';
}

/// `l,<mapper_in>,<intermediate>,<reducer_out>,<wall_ms>` per iteration.
inline void write_metrics(std::ostream& out, const std::vector<engine::IterationMetrics>& iterations) {
  for (const auto& m : iterations)
    out << m.iteration << ',' << m.mapper_in << ',' << m.intermediate << ',' << m.reducer_out << ',' << m.wall_ms
        << '\n';
}

}  // namespace solotrace
