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
#include <random>
#include <string>
#include <vector>

#include "solotrace/formula.hpp"

namespace solotrace {

struct FormulaGenParams {
  std::size_t atoms = 8;           // a0 .. a{atoms-1}
  unsigned max_height = 4;
  std::uint64_t max_window = 60;   // bound on K and on interval endpoints
  bool surface = false;            // also draw F, X, P, Y and A[...]
};

namespace detail {

class FormulaGenerator {
 public:
  FormulaGenerator(FormulaPool& pool, std::mt19937_64& rng, const FormulaGenParams& p) : pool_(pool), rng_(rng), p_(p) {}

  NodeId formula(unsigned budget, bool force_operator) {
    if (budget == 0 || (!force_operator && chance(0.2))) return leaf();
    enum Op { Not, And, Or, Until, Since, Always, Historically, Count, Max, Dist, Ev, Next, Once, Yest, Avg, Ops };
    const int last = p_.surface ? Ops - 1 : Dist;
    const auto op = static_cast<Op>(uniform(0, last));
    auto sub = [&] { return formula(budget - 1, false); };
    switch (op) {
      case Not: return pool_.negation(sub());
      case And:
      case Or: {
        std::vector<NodeId> kids;
        const int n = uniform(2, 3);
        for (int k = 0; k < n; ++k) kids.push_back(sub());
        return op == And ? pool_.conjunction(kids) : pool_.disjunction(kids);
      }
      case Until: {
        const Interval iv = interval();
        const NodeId lhs = sub();
        return pool_.until(iv, lhs, sub());
      }
      case Since: {
        const Interval iv = interval();
        const NodeId lhs = sub();
        return pool_.since(iv, lhs, sub());
      }
      case Always: return pool_.always(interval(), sub());
      case Historically: return pool_.historically(interval(), sub());
      case Count: {
        const auto K = window();
        return pool_.count(comparator(), uniform(0, 4), K, sub());
      }
      case Max: {
        const auto K = window();
        const auto h = step(K);
        return pool_.max_count(comparator(), uniform(0, 3), K, h, sub());
      }
      case Dist: {
        const auto K = window();
        const auto cmp = comparator();
        const auto n = uniform(0, 20);
        const NodeId a = sub();
        return pool_.avg_dist(cmp, n, K, a, sub());
      }
      case Ev: return pool_.eventually(interval(), sub());
      case Next: return pool_.next(interval(), sub());
      case Once: return pool_.once(interval(), sub());
      case Yest: return pool_.yesterday(interval(), sub());
      case Avg: {
        const auto K = window();
        const auto h = step(K);
        return pool_.avg_count(comparator(), uniform(0, 3), K, h, sub());
      }
      default: return leaf();
    }
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  NodeId leaf() {
    if (chance(0.06)) return chance(0.5) ? pool_.truth() : pool_.falsity();
    return pool_.atom("a" + std::to_string(uniform(0, static_cast<int>(p_.atoms) - 1)));
  }

  Comparator comparator() { return static_cast<Comparator>(uniform(0, 4)); }

  std::uint64_t window() { return static_cast<std::uint64_t>(uniform(1, static_cast<int>(p_.max_window))); }

  std::uint64_t step(std::uint64_t K) {
    // mostly short steps so there are several subintervals
    const int cap = static_cast<int>(std::min<std::uint64_t>(K, chance(0.7) ? 10 : K));
    return static_cast<std::uint64_t>(uniform(1, cap));
  }

  Interval interval() {
    const int top = static_cast<int>(p_.max_window);
    while (true) {
      Interval iv;
      iv.lo = static_cast<std::uint64_t>(uniform(0, top / 2));
      iv.lo_closed = chance(0.5);
      if (chance(0.15)) {
        iv.hi.reset();
        iv.hi_closed = false;
      } else {
        iv.hi = static_cast<std::uint64_t>(uniform(static_cast<int>(iv.lo), top));
        iv.hi_closed = chance(0.5);
      }
      if (iv.nonempty()) return iv;
    }
  }

  FormulaPool& pool_;
  std::mt19937_64& rng_;
  const FormulaGenParams& p_;
};

}  // namespace detail

/// Random formula of height at most `max_height` over atoms a0..a{atoms-1}.
/// The root is an operator whenever max_height > 0.
inline NodeId random_formula(FormulaPool& pool, std::mt19937_64& rng, const FormulaGenParams& p) {
  detail::FormulaGenerator gen(pool, rng, p);
  return gen.formula(p.max_height, p.max_height > 0);
}

}  // namespace solotrace
