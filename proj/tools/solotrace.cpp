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

// solotrace: command-line front end.
//
//   solotrace check --trace T --formula F [--workers N] [--emit-all P] [--metrics P] [--oracle]
//   solotrace diff  --seeds A..B [--height-max 4] [--trace-len-max 200] [--atoms 8]
//   solotrace gen   --seed S --len H --atoms U --max-per-instant P --max-gap G --out P
//
// Exit codes: check returns 0 when the formula holds at position 1 and 1
// when it does not; diff returns 1 on a divergence; 2 means bad input.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "solotrace/engine/driver.hpp"
#include "solotrace/formula_table.hpp"
#include "solotrace/oracle.hpp"
#include "solotrace/parser.hpp"
#include "solotrace/random_formula.hpp"
#include "solotrace/report.hpp"
#include "solotrace/rewrite.hpp"
#include "solotrace/trace.hpp"

namespace {

using namespace solotrace;

constexpr int kInputError = 2;

// Signals a user error; reported on stderr with exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

std::string read_formula(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw InputError("cannot read formula file '" + arg.substr(1) + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CheckArgs {
  std::string trace;
  std::string formula;
  unsigned workers = 1;
  std::string emit_all;
  std::string metrics;
  std::string dump_intermediate;
  std::string dump_ts;
  bool oracle = false;
  bool expand_always = false;
};

int cmd_check(const CheckArgs& a) {
  std::ifstream in(a.trace);
  if (!in) throw InputError("cannot read trace '" + a.trace + "'");
  const Trace trace = load_trace(in);
  FormulaPool pool;
  const NodeId root = rewrite_derived(pool, parse_formula(pool, read_formula(a.formula)), {a.expand_always});
  const FormulaTable table = build_table(pool, root);

  CheckReport report;
  HoldsSet holds;
  if (a.oracle) {
    const auto start = std::chrono::steady_clock::now();
    auto eval = oracle::eval_positions(trace, table);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report = make_report("oracle", table, eval.holds, trace.size(), ms);
    report.warnings = eval.warnings.size();
    for (const auto& w : eval.warnings)
      std::cerr << "warning: " << table.text(w.formula) << ": arguments do not alternate at position " << w.position
                << '\n';
    holds = std::move(eval.holds);
  } else {
    std::optional<std::ofstream> dump, dump_ts;
    engine::EngineOptions opts{.workers = a.workers};
    if (!a.dump_intermediate.empty()) opts.dump_intermediate = &dump.emplace(open_out(a.dump_intermediate));
    if (!a.dump_ts.empty()) opts.dump_timestamps = &dump_ts.emplace(open_out(a.dump_ts));
    auto result = engine::run_check(trace, table, opts);
    report = make_report(table, result, trace.size());
    for (const auto& w : result.warnings)
      std::cerr << "warning: " << table.text(w.formula) << ": arguments do not alternate at position " << w.position
                << '\n';
    holds = std::move(result.holds);
  }

  if (!a.emit_all.empty()) {
    auto out = open_out(a.emit_all);
    write_holds(out, holds);
  }
  if (!a.metrics.empty()) {
    auto out = open_out(a.metrics);
    write_metrics(out, report.iterations);
  }
  write_report(std::cout, report);
  return report.verdict ? 0 : 1;
}

struct DiffArgs {
  std::string seeds = "1..100";
  unsigned height_max = 4;
  std::size_t trace_len_max = 200;
  std::size_t atoms = 8;
  unsigned workers = 1;
  std::string inject_fault;
};

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const auto v = std::stoull(s);
      return {v, v};
    }
    const auto lo = std::stoull(s.substr(0, dots)), hi = std::stoull(s.substr(dots + 2));
    if (lo <= hi) return {lo, hi};
  } catch (const std::logic_error&) {
  }
  throw InputError("bad seed range '" + s + "' (expected A..B)");
}

int cmd_diff(const DiffArgs& a) {
  const auto [first, last] = parse_range(a.seeds);
  if (a.atoms < 1 || a.trace_len_max < 1) throw InputError("--atoms and --trace-len-max must be positive");
  if (!a.inject_fault.empty() && a.inject_fault != "no-window-guard")
    throw InputError("unknown fault '" + a.inject_fault + "'");

  std::uint64_t passed = 0;
  for (std::uint64_t seed = first; seed <= last; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t H = std::uniform_int_distribution<std::size_t>(1, a.trace_len_max)(rng);
    const std::size_t per_instant = std::uniform_int_distribution<std::size_t>(1, a.atoms)(rng);
    const Trace trace = generate_random_trace({seed, H, a.atoms, per_instant, 10});
    FormulaPool pool;
    const FormulaTable table = build_table(pool, random_formula(pool, rng, {.atoms = a.atoms, .max_height = a.height_max}));

    const auto want = oracle::eval_positions(trace, table);
    const auto got =
        engine::run_check(trace, table, {.workers = a.workers, .drop_window_guard = !a.inject_fault.empty()});
    for (std::uint32_t f = 0; f < table.size(); ++f) {
      const FormulaId id{f};
      for (Position i = 1; i <= trace.size(); ++i) {
        const bool expected = want.holds.contains(id, i), actual = got.holds.contains(id, i);
        if (expected == actual) continue;
        std::cout << "divergence at seed " << seed << " (H=" << H << ")\n"
                  << "  formula:    " << table.text(table.root()) << '\n'
                  << "  subformula: " << table.text(id) << '\n'
                  << "  position:   " << i << " (timestamp " << trace.timestamp(i) << ")\n"
                  << "  expected:   " << (expected ? "holds" : "does not hold") << '\n'
                  << "  actual:     " << (actual ? "holds" : "does not hold") << '\n'
                  << "passed " << passed << " of " << (last - first + 1) << '\n';
        return 1;
      }
    }
    if (got.warnings != want.warnings) {
      std::cout << "divergence at seed " << seed << ": alternation warnings differ for "
                << table.text(table.root()) << '\n'
                << "passed " << passed << " of " << (last - first + 1) << '\n';
      return 1;
    }
    ++passed;
  }
  std::cout << "passed " << passed << " of " << (last - first + 1) << '\n';
  return 0;
}

struct GenArgs {
  std::uint64_t seed = 0;
  std::size_t len = 0;
  std::size_t atoms = 0;
  std::size_t max_per_instant = 0;
  Timestamp max_gap = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  Trace t;
  try {
    t = generate_random_trace({a.seed, a.len, a.atoms, a.max_per_instant, a.max_gap});
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  auto out = open_out(a.out);
  save_trace(out, t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace checker for metric temporal properties with aggregates"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "check a formula over a trace");
  c->add_option("--trace", check.trace, "trace file")->required();
  c->add_option("--formula", check.formula, "formula text, or @file")->required();
  c->add_option("--workers", check.workers, "worker threads")->check(CLI::PositiveNumber);
  c->add_option("--emit-all", check.emit_all, "write every subformula's positions");
  c->add_option("--metrics", check.metrics, "write per-iteration metrics");
  c->add_option("--dump-intermediate", check.dump_intermediate, "write the intermediate tuples");
  c->add_option("--dump-ts", check.dump_ts, "write the timestamp map");
  c->add_flag("--oracle", check.oracle, "use the sequential reference evaluator");
  c->add_flag("--expand-always", check.expand_always, "rewrite G and H through U and S");

  DiffArgs diff;
  auto* d = app.add_subcommand("diff", "compare the engine with the oracle on random inputs");
  d->add_option("--seeds", diff.seeds, "seed range A..B");
  d->add_option("--height-max", diff.height_max, "largest formula height");
  d->add_option("--trace-len-max", diff.trace_len_max, "longest trace");
  d->add_option("--atoms", diff.atoms, "atom universe size");
  d->add_option("--workers", diff.workers, "engine worker threads")->check(CLI::PositiveNumber);
  d->add_option("--inject-fault", diff.inject_fault, "run a broken engine (no-window-guard)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a random trace");
  g->add_option("--seed", gen.seed, "random seed")->required();
  g->add_option("--len", gen.len, "number of time instants")->required();
  g->add_option("--atoms", gen.atoms, "atom universe size")->required();
  g->add_option("--max-per-instant", gen.max_per_instant, "most atoms per instant")->required();
  g->add_option("--max-gap", gen.max_gap, "largest timestamp gap")->required();
  g->add_option("--out", gen.out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*c) return cmd_check(check);
    if (*d) return cmd_diff(diff);
    return cmd_gen(gen);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    std::cerr << "error: formula: " << e.what() << '\n';
  } catch (const TraceError& e) {
    std::cerr << "error: trace: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kInputError;
}
