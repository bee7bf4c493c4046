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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "solotrace/engine/driver.hpp"
#include "solotrace/formula_table.hpp"
#include "solotrace/oracle.hpp"
#include "solotrace/parser.hpp"
#include "solotrace/random_formula.hpp"
#include "solotrace/rewrite.hpp"

namespace solotrace::engine {
namespace {

using solotrace::testing::t1;
using solotrace::testing::t2;
using solotrace::testing::t3;
using solotrace::testing::trace_from;
using Positions = std::vector<Position>;

FormulaTable table_of(FormulaPool& pool, const std::string& text) {
  return build_table(pool, rewrite_derived(pool, parse_formula(pool, text)));
}

Positions positions_of(const std::vector<Tuple>& ts, FormulaId f) {
  Positions out;
  for (const Tuple& t : ts)
    if (t.formula == f) out.push_back(t.position);
  std::sort(out.begin(), out.end());
  return out;
}

// Runs the reducer of the root over the children's oracle holds-sets, the
// way the shuffle would deliver them at iteration h(root).
struct RootReduce {
  FormulaPool pool;
  FormulaTable table;
  TimestampMap ts;
  ReduceOutput out;

  RootReduce(const Trace& t, const std::string& text, unsigned iteration = 0)
      : table(table_of(pool, text)), ts(timestamp_map(t)) {
    const auto eval = oracle::eval_positions(t, table);
    std::vector<Tuple> values;
    for (FormulaId c : table.direct_subformulae(table.root()))
      for (Position i : eval.holds.positions(c)) values.push_back({c, i});
    std::stable_sort(values.begin(), values.end(),
                     [](const Tuple& a, const Tuple& b) { return a.position < b.position; });
    const ReduceContext ctx{table, ts, iteration ? iteration : table.height()};
    reduce_group(ctx, table.root(), values, out);
  }

  [[nodiscard]] Positions emitted() const { return positions_of(out.tuples, table.root()); }
};

Positions reduced(const Trace& t, const std::string& text) { return RootReduce(t, text).emitted(); }

Positions engine_holds(const Trace& t, const std::string& text, unsigned workers = 1) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, text);
  const auto r = run_check(t, table, {.workers = workers});
  const auto ps = r.holds.positions(table.root());
  return {ps.begin(), ps.end()};
}

TEST(InputReader, EmitsFormulaAtomsOnly) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "a & b");
  const Trace t = t1();
  const AtomFilter atoms(t, table);
  std::vector<Timestamp> slots(t.size());
  std::vector<Tuple> out;
  input_reader(t, 2, 2, atoms, slots, out);
  EXPECT_EQ(out, (std::vector<Tuple>{{*table.find_atom("a"), 2}, {*table.find_atom("b"), 2}}));
  out.clear();
  input_reader(t, 4, 4, atoms, slots, out);
  EXPECT_EQ(out, (std::vector<Tuple>{{*table.find_atom("a"), 4}}));
  EXPECT_EQ(slots[1], 3);
  EXPECT_EQ(slots[3], 10);
}

TEST(InputReader, MaterializesTruth) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "F(0,9) q");
  const Trace t = trace_from("1,1,x\n2,2,q\n3,4,x\n");
  const AtomFilter atoms(t, table);
  std::vector<Timestamp> slots(t.size());
  std::vector<Tuple> out;
  input_reader(t, 1, 3, atoms, slots, out);
  EXPECT_EQ(positions_of(out, *table.truth()), (Positions{1, 2, 3}));
  EXPECT_EQ(positions_of(out, *table.find_atom("q")), (Positions{2}));
  EXPECT_EQ(out.size(), 4u);
}

TEST(Mapper, LiftsToEverySuperformula) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "(a & b) | !a");
  const FormulaId a = *table.find_atom("a");
  std::vector<IntermediateTuple> out;
  EXPECT_EQ(map_lift({a, 5}, table, out), 2u);
  std::vector<std::string> supers;
  for (const auto& t : out) {
    EXPECT_EQ(t.key.position, 5u);
    EXPECT_EQ(t.value, (Tuple{a, 5}));
    supers.push_back(table.text(t.key.super));
  }
  std::sort(supers.begin(), supers.end());
  EXPECT_EQ(supers, (std::vector<std::string>{"!a", "(a & b)"}));
}

TEST(Mapper, RootPassesThrough) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "C[>=3,40](a & b) U(30,100) !c");
  std::vector<IntermediateTuple> out;
  std::vector<Tuple> root;
  EXPECT_EQ(map_lift({table.root(), 3}, table, out, &root), 0u);
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(root, (std::vector<Tuple>{{table.root(), 3}}));

  const FormulaId not_c = *table.find("!c");
  EXPECT_EQ(map_lift({not_c, 7}, table, out), 1u);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].key, (CompositeKey{table.root(), 7}));
  EXPECT_EQ(out[0].value, (Tuple{not_c, 7}));
}

TEST(Shuffle, GroupsAndSortsBySuperformula) {
  const FormulaId psi{5}, chi{2}, x{0}, y{1};
  const auto slots = engine::shuffle({{{psi, 9}, {x, 9}}, {{psi, 2}, {x, 2}}, {{chi, 4}, {x, 4}}, {{psi, 2}, {y, 2}}}, 1);
  ASSERT_EQ(slots.size(), 1u);
  ASSERT_EQ(slots[0].groups.size(), 2u);
  const auto& g_chi = slots[0].groups[0];
  const auto& g_psi = slots[0].groups[1];
  EXPECT_EQ(g_chi.super, chi);
  EXPECT_EQ(g_psi.super, psi);
  EXPECT_EQ(positions_of({slots[0].group_values(g_chi).begin(), slots[0].group_values(g_chi).end()}, x), Positions{4});
  const auto v = slots[0].group_values(g_psi);
  ASSERT_EQ(v.size(), 3u);
  // same key, different subformulae: kept, adjacent, in input order
  EXPECT_EQ(v[0], (Tuple{x, 2}));
  EXPECT_EQ(v[1], (Tuple{y, 2}));
  EXPECT_EQ(v[2], (Tuple{x, 9}));
}

TEST(Shuffle, GroupsNeverSplitAcrossSlots) {
  std::vector<IntermediateTuple> in;
  for (std::uint32_t g = 0; g < 9; ++g)
    for (Position i = 1; i <= 5; ++i) in.push_back({{FormulaId{g}, 6 - i}, {FormulaId{100}, 6 - i}});
  const auto slots = engine::shuffle(in, 4);
  EXPECT_EQ(slots.size(), 4u);
  std::vector<std::uint32_t> seen;
  for (const auto& s : slots)
    for (const auto& g : s.groups) {
      seen.push_back(g.super.value);
      const auto v = s.group_values(g);
      EXPECT_EQ(v.size(), 5u);
      EXPECT_TRUE(std::is_sorted(v.begin(), v.end(), [](auto& a, auto& b) { return a.position < b.position; }));
    }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(seen, (std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(engine::shuffle(in, 20).size(), 9u);
}

TEST(Shuffle, ScheduledFormulaGetsEmptyGroup) {
  const FormulaId lone{3};
  const auto slots = engine::shuffle(std::vector<IntermediateTuple>{}, 2, std::span<const FormulaId>(&lone, 1));
  ASSERT_EQ(slots.size(), 1u);
  ASSERT_EQ(slots[0].groups.size(), 1u);
  EXPECT_EQ(slots[0].groups[0].super, lone);
  EXPECT_TRUE(slots[0].group_values(slots[0].groups[0]).empty());
}

TEST(Reducers, Negation) {
  EXPECT_EQ(reduced(t1(), "!c"), (Positions{1, 2, 3}));
  EXPECT_EQ(reduced(trace_from("1,1,x\n2,2,x\n3,3,x\n"), "!c"), (Positions{1, 2, 3}));
  EXPECT_EQ(reduced(trace_from("1,1,c\n2,2,c\n"), "!c"), Positions{});
}

TEST(Reducers, ConjunctionAndDisjunction) {
  EXPECT_EQ(reduced(t1(), "a & b"), (Positions{2}));
  EXPECT_EQ(reduced(t1(), "a | b"), (Positions{1, 2, 3, 4}));
  EXPECT_EQ(reduced(t1(), "a & b & c"), Positions{});
}

TEST(Reducers, EarlyTuplesAreReEmitted) {
  FormulaPool pool;
  const NodeId a0 = pool.atom("a0"), a1 = pool.atom("a1"), a2 = pool.atom("a2");
  const FormulaTable table = build_table(pool, pool.conjunction({a0, pool.conjunction({a1, a2})}));
  ASSERT_EQ(table.height(), 2u);
  const Trace t = trace_from("1,1,a0\n2,2,a0;a1\n");
  const TimestampMap ts = timestamp_map(t);
  const FormulaId f0 = *table.find_atom("a0");
  const std::vector<Tuple> values{{f0, 1}, {f0, 2}};
  ReduceOutput out;
  reduce_group({table, ts, 1}, table.root(), values, out);
  EXPECT_EQ(out.tuples, values);
  // a finalized superformula drops re-lifted tuples
  ReduceOutput stale;
  reduce_group({table, ts, 3}, table.root(), values, stale);
  EXPECT_TRUE(stale.tuples.empty());
}

TEST(Reducers, UntilAndSince) {
  EXPECT_EQ(reduced(t1(), "a U(1,5) b"), (Positions{1, 2}));
  EXPECT_EQ(reduced(t1(), "b S(1,5) a"), (Positions{2, 3, 5}));
  EXPECT_EQ(reduced(t1(), "a U(1,5) q"), Positions{});
  EXPECT_EQ(reduced(t1(), "a S(1,5) q"), Positions{});
  EXPECT_EQ(reduced(t1(), "true U[4,4] c"), (Positions{3}));
  EXPECT_EQ(reduced(t1(), "true U[0,inf) a"), (Positions{1, 2, 3}));
}

TEST(Reducers, AlwaysAndHistorically) {
  EXPECT_EQ(reduced(t1(), "G(0,5] a"), (Positions{3, 5}));
  EXPECT_EQ(reduced(t1(), "H(0,inf) a"), (Positions{1, 2, 3}));
}

TEST(Reducers, Count) {
  EXPECT_EQ(reduced(t1(), "C[>=1,5](a)"), (Positions{3, 4, 5}));
  EXPECT_EQ(reduced(t1(), "C[>=0,6](q)"), (Positions{3, 4, 5}));
  EXPECT_EQ(reduced(t1(), "C[<1,2](a)"), (Positions{3, 5}));  // includes gaps after the last a
}

TEST(Reducers, MaxCount) {
  EXPECT_EQ(reduced(t3(), "M[<=1,6,2](a)"), (Positions{5}));
  EXPECT_EQ(reduced(t3(), "M[>=1,6,2](q)"), Positions{});
  EXPECT_EQ(reduced(t3(), "M[=1,6,3](a)"), (Positions{5}));
}

TEST(Reducers, AverageDistance) {
  EXPECT_EQ(reduced(t2(), "D[<3,12](req, res)"), (Positions{6}));
  EXPECT_EQ(reduced(trace_from("1,4,req\n2,9,x\n"), "D[>=0,4](req, res)"), Positions{});
  EXPECT_EQ(reduced(trace_from("1,4,req\n2,9,res\n"), "D[=5,9](req, res)"), (Positions{2}));
}

TEST(Reducers, AverageDistanceWarnings) {
  RootReduce r(trace_from("1,1,req\n2,2,req\n3,3,res\n4,4,req;res\n"), "D[<9,4](req, res)");
  normalize(r.out.warnings);
  EXPECT_EQ(r.out.warnings, (std::vector<AlternationWarning>{{r.table.root(), 3}, {r.table.root(), 4}}));
}

TEST(Reducers, AggregatesRespectWindowStart) {
  std::mt19937_64 rng(9);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Trace t = generate_random_trace({k, 60, 3, 2, 4});
    for (const char* f : {"C[>=0,50](a0)", "M[>=0,50,7](a0)", "D[>=0,50](a0, a1)"}) {
      RootReduce r(t, f);
      for (Position i : r.emitted()) EXPECT_GE(t.timestamp(i), 50);
    }
  }
}

TEST(RunCheck, IterationCountEqualsHeight) {
  const Trace t = generate_random_trace({1, 300, 10, 5, 10});
  for (const auto& [text, height] : std::vector<std::pair<std::string, unsigned>>{
           {"C[<10,500](a0)", 1},
           {"D[<10,500](a1, a2)", 1},
           {"(a0&(a1&a2)) U(50,200) ((a1&a2)|a1)", 3},
           {"exists j in 0..9 : forall i in 0..8 : G(50,500)(a_{i,j} -> X(50,500) a_{i+1,j})", 5}}) {
    FormulaPool pool;
    const FormulaTable table = table_of(pool, text);
    EXPECT_EQ(table.height(), height) << text;
    EXPECT_EQ(run_check(t, table).iterations.size(), height) << text;
  }
}

TEST(RunCheck, VerdictAndHolds) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "!c");
  const auto r = run_check(t1(), table);
  EXPECT_TRUE(r.verdict);
  EXPECT_EQ(engine_holds(t1(), "!c"), (Positions{1, 2, 3}));
  FormulaPool p2;
  const FormulaTable count = table_of(p2, "C[>=1,5](a)");
  EXPECT_FALSE(run_check(t1(), count).verdict);
}

TEST(RunCheck, AtomRoot) {
  EXPECT_EQ(engine_holds(t1(), "a"), (Positions{1, 2, 4}));
  EXPECT_EQ(engine_holds(t1(), "true"), (Positions{1, 2, 3, 4, 5}));
  EXPECT_EQ(engine_holds(t1(), "false"), Positions{});
}

TEST(RunCheck, RejectsSurfaceConnectives) {
  FormulaPool pool;
  const FormulaTable table = build_table(pool, parse_formula(pool, "A[<1,6,2](a)"), true);
  EXPECT_THROW(run_check(t1(), table), std::invalid_argument);
}

TEST(RunCheck, MatchesOracle) {
  std::mt19937_64 rng(101);
  for (std::uint64_t k = 0; k < 300; ++k) {
    std::mt19937_64 shape(k);
    const std::size_t H = std::uniform_int_distribution<std::size_t>(1, 80)(shape);
    const Trace t = generate_random_trace({k, H, 5, 3, 10});
    FormulaPool pool;
    const FormulaTable table = build_table(pool, random_formula(pool, rng, {.atoms = 5, .max_height = 4}));
    const auto want = oracle::eval_positions(t, table);
    const auto got = run_check(t, table, {.workers = 1 + static_cast<unsigned>(k % 3)});
    for (std::uint32_t f = 0; f < table.size(); ++f) {
      const auto a = got.holds.positions(FormulaId{f});
      const auto b = want.holds.positions(FormulaId{f});
      ASSERT_EQ(Positions(a.begin(), a.end()), Positions(b.begin(), b.end()))
          << "seed " << k << ": " << table.text(FormulaId{f});
    }
    ASSERT_EQ(got.warnings, want.warnings) << "seed " << k;
  }
}

TEST(RunCheck, DeterministicAcrossWorkers) {
  const Trace t = generate_random_trace({42, 2000, 8, 4, 10});
  FormulaPool pool;
  const FormulaTable table =
      table_of(pool, "(C[>=2,40](a0 | a1) U(0,30] !a2) & D[<8,60](a3, a4) | M[>1,50,7](a5 S[2,20) a6)");
  std::string first;
  for (unsigned w : {1u, 2u, 8u}) {
    std::ostringstream out;
    write_holds(out, run_check(t, table, {.workers = w}).holds);
    if (w == 1) first = out.str();
    EXPECT_EQ(out.str(), first) << "workers " << w;
  }
  EXPECT_FALSE(first.empty());
}

TEST(RunCheck, Accounting) {
  const Trace t = generate_random_trace({5, 500, 6, 3, 10});
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "(a0 & (a1 | !a2)) U(0,20] C[>=2,30](a3 & a0)");
  const auto r = run_check(t, table);
  std::size_t total = 0;
  for (const auto& m : r.iterations) {
    EXPECT_EQ(m.intermediate, m.expected_lifts) << "iteration " << m.iteration;
    total += m.mapper_in;
  }
  EXPECT_EQ(r.total_tuples(), total);
  ASSERT_FALSE(r.iterations.empty());
  // iteration 1 reads exactly the atom occurrences of the formula
  std::size_t atoms = 0;
  for (Position i = 1; i <= t.size(); ++i)
    for (SymbolId s : t.atoms(i)) atoms += table.find_atom(t.symbol_name(s)).has_value();
  EXPECT_EQ(r.iterations[0].mapper_in, atoms);
}

TEST(RunCheck, WindowQueuesStayInsideTheWindow) {
  const Trace t = generate_random_trace({8, 3000, 4, 3, 5});
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "C[<3,40](a0) | M[>=2,40,5](a1) | D[<6,40](a2, a3)");
  const auto r = run_check(t, table);
  std::size_t occupancy = 0;  // most positions in any (τ - 40, τ]
  for (Position i = 1, lo = 1; i <= t.size(); ++i) {
    while (t.timestamp(lo) <= t.timestamp(i) - 40) ++lo;
    occupancy = std::max<std::size_t>(occupancy, i - lo + 1);
  }
  for (const char* text : {"C[<3,40](a0)", "M[>=2,40,5](a1)", "D[<6,40](a2, a3)"}) {
    const auto peak = r.peak_tracked[table.find(text)->value];
    EXPECT_GT(peak, 0u) << text;
    EXPECT_LE(peak, occupancy) << text;
  }
}

TEST(RunCheck, DumpsIntermediateTuples) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "a & b");
  std::ostringstream dump, ts;
  run_check(t1(), table, {.dump_intermediate = &dump, .dump_timestamps = &ts});
  const auto a = table.find_atom("a")->value, b = table.find_atom("b")->value, r = table.root().value;
  std::ostringstream want;
  want << "# iteration 1\n";
  std::vector<std::tuple<Position, std::uint32_t>> rows{{1, a}, {2, a}, {2, b}, {3, b}, {4, a}};
  std::sort(rows.begin(), rows.end(), [](auto& x, auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
  });
  for (auto [p, f] : rows) want << r << ',' << p << ',' << f << '\n';
  EXPECT_EQ(dump.str(), want.str());
  EXPECT_EQ(ts.str(), "1,1\n2,3\n3,6\n4,10\n5,12\n");
}

TEST(RunCheck, WindowGuardFaultIsVisible) {
  FormulaPool pool;
  const FormulaTable table = table_of(pool, "C[<1,5](q)");
  const auto good = run_check(t1(), table);
  const auto bad = run_check(t1(), table, {.drop_window_guard = true});
  EXPECT_NE(good.holds, bad.holds);
}

}  // namespace
}  // namespace solotrace::engine
