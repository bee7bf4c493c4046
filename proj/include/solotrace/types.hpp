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

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace solotrace {

/// Trace position, 1-based.
using Position = std::uint32_t;

/// Timestamp in seconds. Signed so that window arithmetic such as
/// `tau - K` never wraps.
using Timestamp = std::int64_t;

/// Relational operator used by the aggregate modalities.
enum class Comparator : std::uint8_t { Less, LessEqual, GreaterEqual, Greater, Equal };

template <class T>
constexpr bool compare(Comparator cmp, const T& lhs, const T& rhs) noexcept {
  switch (cmp) {
    case Comparator::Less:
      return lhs < rhs;
    case Comparator::LessEqual:
      return lhs <= rhs;
    case Comparator::GreaterEqual:
      return lhs >= rhs;
    case Comparator::Greater:
      return lhs > rhs;
    case Comparator::Equal:
      return lhs == rhs;
  }
  return false;
}

inline std::string_view to_string(Comparator cmp) noexcept {
  switch (cmp) {
    case Comparator::Less:
      return "<";
    case Comparator::LessEqual:
      return "<=";
    case Comparator::GreaterEqual:
      return ">=";
    case Comparator::Greater:
      return ">";
    case Comparator::Equal:
      return "=";
  }
  return "?";
}

/// Interval of time distances over the naturals. An absent upper bound
/// stands for +infinity and is always open.
struct Interval {
  std::uint64_t lo = 0;
  std::optional<std::uint64_t> hi;
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval make(std::uint64_t lo, std::optional<std::uint64_t> hi, bool lo_closed,
                       bool hi_closed) {
    Interval iv{lo, hi, lo_closed, hi && hi_closed};
    if (!iv.nonempty()) throw std::invalid_argument("empty interval " + iv.to_string());
    return iv;
  }

  static Interval open(std::uint64_t lo, std::uint64_t hi) { return make(lo, hi, false, false); }
  static Interval closed(std::uint64_t lo, std::uint64_t hi) { return make(lo, hi, true, true); }
  static Interval unbounded(std::uint64_t lo = 0, bool lo_closed = false) {
    return make(lo, std::nullopt, lo_closed, false);
  }

  /// True iff at least one natural number lies inside.
  [[nodiscard]] bool nonempty() const noexcept {
    const std::uint64_t first = lo_closed ? lo : lo + 1;
    return below_upper(static_cast<Timestamp>(first));
  }

  [[nodiscard]] bool above_lower(Timestamp d) const noexcept {
    const auto l = static_cast<Timestamp>(lo);
    return lo_closed ? d >= l : d > l;
  }

  [[nodiscard]] bool below_upper(Timestamp d) const noexcept {
    if (!hi) return true;
    const auto h = static_cast<Timestamp>(*hi);
    return hi_closed ? d <= h : d < h;
  }

  [[nodiscard]] bool contains(Timestamp d) const noexcept { return above_lower(d) && below_upper(d); }

  [[nodiscard]] std::string to_string() const {
    std::string out;
    out += lo_closed ? '[' : '(';
    out += std::to_string(lo);
    out += ',';
    out += hi ? std::to_string(*hi) : std::string("inf");
    out += hi_closed ? ']' : ')';
    return out;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace solotrace
