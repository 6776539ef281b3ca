// Copyright 2026 The Hopcast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hopcast/cli.hpp"

namespace hopcast::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, kUsage);
  EXPECT_EQ(call({"bogus"}).code, kUsage);
  EXPECT_EQ(call({"sweep"}).code, kUsage);  // --n required
  EXPECT_EQ(call({"sweep", "--n", "5", "--policy", "lax"}).code, kUsage);
  EXPECT_EQ(call({"sweep", "--n", "5", "--faulty-processes", "3"}).code, kUsage);
  EXPECT_EQ(call({"equations", "--n", "2"}).code, kUsage);
  EXPECT_EQ(call({"--help"}).code, kOk);
}

TEST(Cli, Equations) {
  const auto r = call({"equations", "--n", "9"});
  ASSERT_EQ(r.code, kOk);
  EXPECT_EQ(r.out,
            "n\tF\tc\tf\n9\t0\t8\t27\n9\t1\t8\t15\n9\t2\t8\t11\n9\t3\t8\t7\n"
            "9\t4\t8\t3\n");
}

TEST(Cli, SweepFiveProcesses) {
  const auto r = call({"sweep", "--n", "5", "--threads", "1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("5\t2\t2\t1900\t1840\t"), std::string::npos);
  EXPECT_NE(r.out.find("5\t0\t10\t184756\t184696\t"), std::string::npos);
  EXPECT_NE(r.out.find("# n=5 F=0: ensured up to f=9"), std::string::npos);
  EXPECT_NE(r.out.find("# n=5 F=1: ensured up to f=3"), std::string::npos);
  EXPECT_NE(r.out.find("# n=5 F=2: ensured up to f=1"), std::string::npos);
  // header + 3 x 21 records + 3 summary lines
  EXPECT_EQ(count_lines(r.out), 1 + 63 + 3);
}

TEST(Cli, BoundaryAndBudget) {
  const auto r = call({"boundary", "--n", "5", "--threads", "1"});
  ASSERT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "n\tF\tmode\tf\n5\t0\tconsensus\t9\n5\t1\tconsensus\t3\n"
                   "5\t2\tconsensus\t1\n");
  const auto d = call({"boundary", "--n", "5", "--mode", "delivery:4"});
  ASSERT_EQ(d.code, kOk);
  EXPECT_EQ(d.out, "n\tF\tmode\tf\n5\t0\tdelivery:4\t5\n");
  const auto refused = call({"boundary", "--n", "9", "--budget", "1000"});
  EXPECT_EQ(refused.code, kRefused);
  EXPECT_NE(refused.err.find("budget"), std::string::npos);
  EXPECT_EQ(call({"boundary", "--n", "5", "--mode", "delivery:9"}).code, kUsage);
}

TEST(Cli, SimulateIsDeterministicAndReplays) {
  const auto dir = std::filesystem::temp_directory_path() / "hopcast_cli_test";
  std::filesystem::create_directories(dir);
  const auto inputs = (dir / "inputs.txt").string();
  const std::vector<std::string> args = {
      "simulate", "--n", "6", "--faulty-processes", "1", "--faulty-links", "5",
      "--seed", "77", "--policy", "strict"};
  const auto a = call(args);
  const auto b = call(args);
  ASSERT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto save = args;
  save.insert(save.end(), {"--save-inputs", inputs});
  ASSERT_EQ(call(save).code, kOk);
  const auto replayed = call({"simulate", "--replay", inputs});
  ASSERT_EQ(replayed.code, kOk);
  EXPECT_EQ(replayed.out, a.out);

  std::string text = slurp(inputs);
  text.replace(text.find("hopcast-1"), 9, "hopcast-0");
  { std::ofstream(inputs) << text; }
  EXPECT_EQ(call({"simulate", "--replay", inputs}).code, kError);
  EXPECT_EQ(call({"simulate", "--replay", (dir / "missing").string()}).code,
            kError);
  std::filesystem::remove_all(dir);
}

TEST(Cli, Figure1) {
  const auto r = call({"figure1"});
  ASSERT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("# Q received P's Phase-One message"), std::string::npos);
  EXPECT_NE(r.out.find("# P received Q's Phase-One message"), std::string::npos);
  EXPECT_NE(r.out.find("# decided 6 of 6 correct processes; agreement yes; all "
                       "decisions within 4 RTTB (80 ticks) yes"),
            std::string::npos);
  EXPECT_EQ(call({"figure1", "--n", "5"}).code, kUsage);
}

TEST(Cli, CrossvalSmall) {
  const auto r = call({"crossval", "--n-min", "4", "--n", "7", "--brute-budget",
                       "100000000", "--threads", "1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("5\t0\t9\t9\t9\tyes"), std::string::npos);
  EXPECT_NE(r.out.find(" 0 discrepancies"), std::string::npos);
}

TEST(Cli, OutFileGetsData) {
  const auto path = std::filesystem::temp_directory_path() / "hopcast_eq.tsv";
  const auto r = call({"equations", "--n", "5", "--out", path.string()});
  ASSERT_EQ(r.code, kOk);
  EXPECT_EQ(slurp(path), "n\tF\tc\tf\n5\t0\t4\t9\n5\t1\t4\t3\n5\t2\t4\t1\n");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hopcast::cli
