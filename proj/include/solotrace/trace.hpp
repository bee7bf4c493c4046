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
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "solotrace/types.hpp"

namespace solotrace {

class TraceError : public std::runtime_error {
 public:
  TraceError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  /// 1-based source line, 0 when not tied to a line.
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

using SymbolId = std::uint32_t;

/// View of one trace element (i, τ_i, σ_i).
struct TraceEntry {
  Position position;
  Timestamp timestamp;
  std::span<const SymbolId> atoms;
};

/// Finite timed word. Atom names are interned into a per-trace symbol
/// table and entries are stored flat, so a trace with tens of millions of
/// events stays compact.
class Trace {
 public:
  [[nodiscard]] std::size_t size() const noexcept { return timestamps_.size(); }
  [[nodiscard]] bool empty() const noexcept { return timestamps_.empty(); }

  [[nodiscard]] Timestamp timestamp(Position i) const { return timestamps_.at(i - 1); }
  [[nodiscard]] std::span<const SymbolId> atoms(Position i) const {
    const std::size_t k = i - 1;
    return std::span<const SymbolId>(symbols_).subspan(offsets_.at(k), offsets_.at(k + 1) - offsets_[k]);
  }
  [[nodiscard]] TraceEntry entry(Position i) const { return {i, timestamp(i), atoms(i)}; }
  [[nodiscard]] std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }

  [[nodiscard]] const std::string& symbol_name(SymbolId s) const { return names_.at(s); }
  [[nodiscard]] std::size_t symbol_count() const noexcept { return names_.size(); }
  [[nodiscard]] std::size_t event_count() const noexcept { return symbols_.size(); }

  [[nodiscard]] bool holds(Position i, std::string_view atom) const {
    for (SymbolId s : atoms(i))
      if (names_[s] == atom) return true;
    return false;
  }

  /// Appends the next entry; enforces every trace invariant.
  void append(Timestamp ts, std::span<const std::string> atoms, std::size_t line = 0) {
    if (ts < 1) throw TraceError("timestamps must be at least 1", line);
    if (!timestamps_.empty() && ts <= timestamps_.back())
      throw TraceError("timestamps must increase strictly (" + std::to_string(timestamps_.back()) + " then " +
                           std::to_string(ts) + ")",
                       line);
    if (atoms.empty()) throw TraceError("entry has no atoms", line);
    const std::size_t first = symbols_.size();
    for (const std::string& a : atoms) {
      if (!valid_atom(a)) throw TraceError("invalid atom name '" + a + "'", line);
      const SymbolId s = intern(a);
      if (std::find(symbols_.begin() + static_cast<std::ptrdiff_t>(first), symbols_.end(), s) != symbols_.end()) {
        symbols_.resize(first);
        throw TraceError("duplicate atom '" + a + "'", line);
      }
      symbols_.push_back(s);
    }
    timestamps_.push_back(ts);
    offsets_.push_back(symbols_.size());
  }

  static bool valid_atom(std::string_view a) noexcept {
    if (a.empty() || !(std::isalpha(static_cast<unsigned char>(a[0])) || a[0] == '_')) return false;
    return std::all_of(a.begin(), a.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
  }

  friend bool operator==(const Trace& a, const Trace& b) {
    if (a.size() != b.size() || a.timestamps_ != b.timestamps_) return false;
    for (Position i = 1; i <= a.size(); ++i) {
      auto x = a.atoms(i), y = b.atoms(i);
      if (x.size() != y.size()) return false;
      for (std::size_t k = 0; k < x.size(); ++k)
        if (a.symbol_name(x[k]) != b.symbol_name(y[k])) return false;
    }
    return true;
  }

 private:
  SymbolId intern(const std::string& a) {
    auto [it, inserted] = index_.try_emplace(a, static_cast<SymbolId>(names_.size()));
    if (inserted) names_.push_back(a);
    return it->second;
  }

  std::vector<Timestamp> timestamps_;
  std::vector<std::size_t> offsets_{0};
  std::vector<SymbolId> symbols_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, SymbolId> index_;
};

/// Position → timestamp map shared read-only by every reducer.
class TimestampMap {
 public:
  TimestampMap() = default;
  explicit TimestampMap(std::vector<Timestamp> ts) : ts_(std::move(ts)) {}

  [[nodiscard]] Timestamp operator()(Position i) const { return ts_[i - 1]; }
  [[nodiscard]] Timestamp at(Position i) const { return ts_.at(i - 1); }
  [[nodiscard]] Position size() const noexcept { return static_cast<Position>(ts_.size()); }
  [[nodiscard]] std::span<const Timestamp> values() const noexcept { return ts_; }

 private:
  std::vector<Timestamp> ts_;
};

inline TimestampMap timestamp_map(const Trace& t) {
  return TimestampMap(std::vector<Timestamp>(t.timestamps().begin(), t.timestamps().end()));
}

namespace detail {

template <class Int>
Int parse_int(std::string_view s, std::size_t line, std::string_view what) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw TraceError("malformed " + std::string(what) + " '" + std::string(s) + "'", line);
  return v;
}

}  // namespace detail

/// Reads the line format `<position>,<timestamp>,<atom>(;<atom>)*`.
/// Lines starting with '#' and blank lines are skipped.
inline Trace load_trace(std::istream& in) {
  Trace t;
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::string> atoms;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw TraceError("expected <position>,<timestamp>,<atoms>", line_no);
    const auto pos = detail::parse_int<std::uint64_t>(line.substr(0, c1), line_no, "position");
    const auto ts = detail::parse_int<Timestamp>(line.substr(c1 + 1, c2 - c1 - 1), line_no, "timestamp");
    if (pos != t.size() + 1)
      throw TraceError(t.empty() ? "positions must start at 1"
                                 : "expected position " + std::to_string(t.size() + 1) + ", got " + std::to_string(pos),
                       line_no);
    atoms.clear();
    std::string_view rest = line.substr(c2 + 1);
    if (rest.empty()) throw TraceError("entry has no atoms", line_no);
    std::size_t start = 0;
    while (true) {
      const auto sep = rest.find(';', start);
      atoms.emplace_back(rest.substr(start, sep == std::string_view::npos ? sep : sep - start));
      if (sep == std::string_view::npos) break;
      start = sep + 1;
    }
    t.append(ts, atoms, line_no);
  }
  if (t.empty()) throw TraceError("trace is empty", 0);
  return t;
}

inline void save_trace(std::ostream& out, const Trace& t) {
  std::string line;
  for (Position i = 1; i <= t.size(); ++i) {
    line.clear();
    line += std::to_string(i);
    line += ',';
    line += std::to_string(t.timestamp(i));
    line += ',';
    bool first = true;
    for (SymbolId s : t.atoms(i)) {
      if (!first) line += ';';
      line += t.symbol_name(s);
      first = false;
    }
    line += '\n';
    out << line;
  }
}

struct TraceGenParams {
  std::uint64_t seed = 0;
  std::size_t length = 1;           // H
  std::size_t atom_universe = 1;    // atoms are a0 .. a{U-1}
  std::size_t max_atoms_per_instant = 1;
  Timestamp max_gap = 1;
};

/// Uniform random trace: each instant gets 1..max_atoms_per_instant
/// distinct atoms drawn uniformly from the universe, and consecutive
/// timestamps differ by a uniform gap in 1..max_gap.
inline Trace generate_random_trace(const TraceGenParams& p) {
  if (p.length < 1) throw std::invalid_argument("trace length must be at least 1");
  if (p.atom_universe < 1) throw std::invalid_argument("atom universe must be nonempty");
  if (p.max_atoms_per_instant < 1 || p.max_atoms_per_instant > p.atom_universe)
    throw std::invalid_argument("max atoms per instant must be in 1..universe size");
  if (p.max_gap < 1) throw std::invalid_argument("max gap must be at least 1");

  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<std::size_t> count_dist(1, p.max_atoms_per_instant);
  std::uniform_int_distribution<Timestamp> gap_dist(1, p.max_gap);
  std::vector<std::string> universe;
  universe.reserve(p.atom_universe);
  for (std::size_t k = 0; k < p.atom_universe; ++k) universe.push_back("a" + std::to_string(k));

  std::vector<std::size_t> pool(p.atom_universe);
  std::vector<std::string> chosen;
  Trace t;
  Timestamp ts = 0;
  for (std::size_t i = 0; i < p.length; ++i) {
    ts += gap_dist(rng);
    const std::size_t k = count_dist(rng);
    // partial Fisher-Yates: first k slots are a uniform k-subset
    for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = j;
    chosen.clear();
    for (std::size_t j = 0; j < k; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
      std::swap(pool[j], pool[pick(rng)]);
      chosen.push_back(universe[pool[j]]);
    }
    t.append(ts, chosen);
  }
  return t;
}

}  // namespace solotrace
