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

#include <unordered_map>
#include <vector>

#include "solotrace/formula.hpp"

namespace solotrace {

struct RewriteOptions {
  /// Replace G and H by their Until/Since duals, ¬(⊤ U ¬φ) and
  /// ¬(⊤ S ¬φ). When false they stay native connectives with their own
  /// reducers; the expansion adds two levels of height per occurrence.
  bool expand_always = false;
};

/// Rewrites surface forms into core connectives:
///
///   F_I φ → ⊤ U_I φ      P_I φ → ⊤ S_I φ
///   X_I φ → ⊥ U_I φ      Y_I φ → ⊥ S_I φ
///   G_I φ → ¬(⊤ U_I ¬φ)  H_I φ → ¬(⊤ S_I ¬φ)   (only with expand_always)
///   A[⋈n,K,h](φ) → C[⋈ n·q, q·h](φ)            q = ⌊K/h⌋
///
/// The average-count rewrite is exact when h divides K. Otherwise the
/// count window q·h is shorter than K and the `τ ≥ K` guard of the average
/// would be lost, so the result is conjoined with C[>=0,K](false), which
/// holds exactly at positions with τ ≥ K.
inline NodeId rewrite_derived(FormulaPool& pool, NodeId root, const RewriteOptions& opts = {}) {
  std::unordered_map<std::uint32_t, NodeId> memo;
  auto go = [&](auto&& self, NodeId id) -> NodeId {
    if (auto it = memo.find(id.value); it != memo.end()) return it->second;
    const Node node = pool[id];  // copy: the pool may grow below
    std::vector<NodeId> kids;
    kids.reserve(node.children.size());
    for (NodeId c : node.children) kids.push_back(self(self, c));
    NodeId out{};
    switch (node.kind) {
      case Kind::Eventually:
        out = pool.until(node.interval, pool.truth(), kids[0]);
        break;
      case Kind::Next:
        out = pool.until(node.interval, pool.falsity(), kids[0]);
        break;
      case Kind::Once:
        out = pool.since(node.interval, pool.truth(), kids[0]);
        break;
      case Kind::Yesterday:
        out = pool.since(node.interval, pool.falsity(), kids[0]);
        break;
      case Kind::Always:
        out = opts.expand_always
                  ? pool.negation(pool.until(node.interval, pool.truth(), pool.negation(kids[0])))
                  : pool.rebuild(node, std::move(kids));
        break;
      case Kind::Historically:
        out = opts.expand_always
                  ? pool.negation(pool.since(node.interval, pool.truth(), pool.negation(kids[0])))
                  : pool.rebuild(node, std::move(kids));
        break;
      case Kind::AvgCount: {
        const auto& a = node.agg;
        const std::uint64_t q = a.window / a.step;
        const NodeId count = pool.count(a.cmp, a.bound * q, q * a.step, kids[0]);
        out = q * a.step == a.window
                  ? count
                  : pool.conjunction({count, pool.count(Comparator::GreaterEqual, 0, a.window, pool.falsity())});
        break;
      }
      default:
        out = node.children.empty() ? id : pool.rebuild(node, std::move(kids));
        break;
    }
    memo.emplace(id.value, out);
    return out;
  };
  return go(go, root);
}

}  // namespace solotrace
