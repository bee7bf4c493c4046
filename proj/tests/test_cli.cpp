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
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("solotrace_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    write("t1.log", "1,1,a\n2,3,a;b\n3,6,b\n4,10,a;c\n5,12,c\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  [[nodiscard]] std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  // Runs the CLI with stdout to `out` and stderr to `err` in the test directory.
  int run(const std::string& args, const std::string& out = "stdout.txt") const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" SOLOTRACE_CLI "' " + args + " > " + out + " 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  [[nodiscard]] std::map<std::string, std::string> report(const std::string& name = "stdout.txt") const {
    std::map<std::string, std::string> kv;
    std::istringstream in(read(name));
    for (std::string line; std::getline(in, line);) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
  }

  fs::path dir_;
};

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST_F(Cli, CheckExitCodes) {
  EXPECT_EQ(run("check --trace t1.log --formula '!c'"), 0);
  EXPECT_EQ(report()["verdict"], "true");
  EXPECT_EQ(run("check --trace t1.log --formula 'C[>=1,5](a)'"), 1);
  EXPECT_EQ(report()["verdict"], "false");
  EXPECT_EQ(run("check --trace missing.log --formula a"), 2);
  EXPECT_FALSE(read("stderr.txt").empty());
  EXPECT_EQ(run("check --trace t1.log --formula 'a U(3,4) b'"), 2);
  EXPECT_EQ(run("check --trace t1.log"), 2);
  write("bad.log", "1,5,a\n2,5,b\n");
  EXPECT_EQ(run("check --trace bad.log --formula a"), 2);
  EXPECT_NE(read("stderr.txt").find("line 2"), std::string::npos);
  EXPECT_EQ(run("bogus"), 2);
}

TEST_F(Cli, FormulaFromFile) {
  write("f.txt", "a U(1,5) b\n");
  EXPECT_EQ(run("check --trace t1.log --formula @f.txt"), 0);
  EXPECT_EQ(run("check --trace t1.log --formula @nope.txt"), 2);
}

TEST_F(Cli, EmitAllFormat) {
  ASSERT_EQ(run("check --trace t1.log --formula '!c' --emit-all holds.txt"), 0);
  EXPECT_EQ(read("holds.txt"), "0,4\n0,5\n1,1\n1,2\n1,3\n");
}

TEST_F(Cli, ReportAndMetrics) {
  ASSERT_EQ(run("gen --seed 3 --len 400 --atoms 6 --max-per-instant 3 --max-gap 10 --out t.log"), 0);
  EXPECT_EQ(run("check --trace t.log --formula '(a0 & (a1 | a2)) U(0,40] C[>=1,30](a3)' --metrics m.txt"), 1);
  auto kv = report();
  EXPECT_EQ(kv["height"], "3");
  EXPECT_EQ(kv["iterations"], "3");
  EXPECT_EQ(kv["trace_length"], "400");
  std::size_t sum = 0;
  for (int l = 1; l <= 3; ++l) sum += std::stoul(kv["iteration." + std::to_string(l) + ".mapper_in"]);
  EXPECT_EQ(std::stoul(kv["total_tuples"]), sum);
  EXPECT_GE(std::stod(kv["per_event_us"]), 0.0);
  const std::string m = read("m.txt");
  EXPECT_EQ(lines(m), 3u);
  std::istringstream in(m);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("1," + kv["iteration.1.mapper_in"] + "," + kv["iteration.1.intermediate"] + "," +
                          kv["iteration.1.reducer_out"] + ",",
                      0),
            0u);
}

TEST_F(Cli, WorkersDoNotChangeResults) {
  ASSERT_EQ(run("gen --seed 42 --len 3000 --atoms 8 --max-per-instant 4 --max-gap 10 --out t.log"), 0);
  const std::string f = "'D[<8,60](a3, a4) | (C[>=2,40](a0 | a1) U(0,30] !a2)'";
  std::vector<std::string> emitted;
  std::vector<std::map<std::string, std::string>> reports;
  for (int w : {1, 8}) {
    const std::string tag = std::to_string(w);
    run("check --trace t.log --formula " + f + " --workers " + tag + " --emit-all e" + tag + ".txt", "r" + tag + ".txt");
    emitted.push_back(read("e" + tag + ".txt"));
    auto kv = report("r" + tag + ".txt");
    for (auto it = kv.begin(); it != kv.end();)
      it = it->first.find("wall_ms") != std::string::npos || it->first == "per_event_us" ? kv.erase(it) : ++it;
    reports.push_back(kv);
  }
  EXPECT_EQ(emitted[0], emitted[1]);
  EXPECT_EQ(reports[0], reports[1]);
}

TEST_F(Cli, OracleAgreesWithEngine) {
  ASSERT_EQ(run("gen --seed 5 --len 150 --atoms 4 --max-per-instant 2 --max-gap 6 --out t.log"), 0);
  const std::string f = "'G[0,12) (a0 -> F(0,10] a1) & M[<=2,20,4](a2 S(0,9] a3)'";
  const int engine = run("check --trace t.log --formula " + f + " --emit-all e.txt");
  const int oracle = run("check --trace t.log --formula " + f + " --oracle --emit-all o.txt");
  EXPECT_EQ(engine, oracle);
  EXPECT_EQ(read("e.txt"), read("o.txt"));
  EXPECT_EQ(report()["mode"], "oracle");
}

TEST_F(Cli, DumpFiles) {
  ASSERT_EQ(run("check --trace t1.log --formula 'a & b' --dump-intermediate d.txt --dump-ts ts.txt"), 1);
  EXPECT_EQ(read("ts.txt"), "1,1\n2,3\n3,6\n4,10\n5,12\n");
  EXPECT_EQ(read("d.txt").rfind("# iteration 1\n", 0), 0u);
  EXPECT_EQ(lines(read("d.txt")), 6u);
}

TEST_F(Cli, DiffPassesAndCatchesFaults) {
  EXPECT_EQ(run("diff --seeds 1..60 --height-max 4 --trace-len-max 200 --atoms 8"), 0);
  EXPECT_NE(read("stdout.txt").find("passed 60 of 60"), std::string::npos);
  EXPECT_NE(run("diff --seeds 1..60 --inject-fault no-window-guard"), 0);
  EXPECT_NE(read("stdout.txt").find("divergence at seed"), std::string::npos);
  EXPECT_EQ(run("diff --seeds 9..3"), 2);
  EXPECT_EQ(run("diff --seeds 1..3 --inject-fault other"), 2);
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --seed 7 --len 300 --atoms 5 --max-per-instant 3 --max-gap 4 --out a.log"), 0);
  ASSERT_EQ(run("gen --seed 7 --len 300 --atoms 5 --max-per-instant 3 --max-gap 4 --out b.log"), 0);
  EXPECT_EQ(read("a.log"), read("b.log"));
  EXPECT_EQ(lines(read("a.log")), 300u);
}

TEST_F(Cli, GenLargeTrace) {
  ASSERT_EQ(run("gen --seed 1 --len 100000 --atoms 100 --max-per-instant 100 --max-gap 2 --out big.log"), 0);
  EXPECT_EQ(lines(read("big.log")), 100000u);
}

TEST_F(Cli, GenRejectsBadParameters) {
  EXPECT_EQ(run("gen --seed 1 --len 5 --atoms 3 --max-per-instant 0 --max-gap 3 --out g.log"), 2);
  EXPECT_EQ(run("gen --seed 1 --len 0 --atoms 3 --max-per-instant 1 --max-gap 3 --out g.log"), 2);
  EXPECT_EQ(run("gen --seed 1 --len 5 --atoms 3 --max-per-instant 1 --max-gap 3"), 2);
}

}  // namespace
