// Copyright 2026 The bdsw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Output {
  int status = -1;
  std::string out;
};

Output bdsw(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " BDSW_CLI_PATH " " + args + " 2>/dev/null";
  Output o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) o.out.append(buf, n);
  const int st = pclose(p);
  o.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

std::vector<json> records(const std::string& text) {
  std::vector<json> r;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) r.push_back(json::parse(line));
  return r;
}

void expect_record_schema(const json& j) {
  ASSERT_TRUE(j.is_object());
  for (const char* k : {"seed", "n", "n_post_test", "ec_rounds", "pa_rounds", "key_length", "ec_slack",
                        "pa_slack"})
    EXPECT_TRUE(j.at(k).is_number_unsigned()) << k;
  for (const char* k : {"delta_b", "delta_p", "tag_fraction", "test_fraction", "realized_rate",
                        "formula_rate", "wall_time_ms"})
    EXPECT_TRUE(j.at(k).is_number()) << k;
  for (const char* k : {"mode", "sampling", "abort_reason", "key_hex"})
    EXPECT_TRUE(j.at(k).is_string()) << k;
  EXPECT_TRUE(j.at("agreed").is_boolean());
  EXPECT_TRUE(j.at("estimates").at("delta_b").is_number());
  EXPECT_TRUE(j.at("estimates").at("delta_p").is_number());
  const auto reason = j.at("abort_reason").get<std::string>();
  EXPECT_TRUE(reason == "none" || reason == "no_key" || reason == "decoding_failed");
  if (reason != "none") EXPECT_EQ(j.at("key_length"), 0);
}

std::string without_timing(json j) {
  j.erase("wall_time_ms");
  return j.dump();
}

}  // namespace

TEST(Cli, RunEmitsOneValidRecord) {
  const auto o = bdsw("run --n 4096 --delta-b 0.05 --delta-p 0.05 --seed 7");
  ASSERT_EQ(o.status, 0);
  const auto r = records(o.out);
  ASSERT_EQ(r.size(), 1u);
  expect_record_schema(r[0]);
  EXPECT_TRUE(r[0]["agreed"].get<bool>());
  EXPECT_EQ(r[0]["seed"], 7);
}

TEST(Cli, SeedDeterminesOutput) {
  const auto a = records(bdsw("run --n 512 --delta-b 0.03 --delta-p 0.03 --seed 9 --runs 3").out);
  const auto b = records(bdsw("run --n 512 --delta-b 0.03 --delta-p 0.03 --seed 9 --runs 3").out);
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(b.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    expect_record_schema(a[i]);
    EXPECT_EQ(a[i]["seed"], 9 + i);
    EXPECT_EQ(without_timing(a[i]), without_timing(b[i]));
  }
}

TEST(Cli, EnvironmentSeedFallback) {
  const auto a = records(bdsw("run --n 256", "BDSW_SEED=21").out);
  const auto b = records(bdsw("run --n 256 --seed 21").out);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(without_timing(a[0]), without_timing(b[0]));
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(bdsw("run --delta-b 0.6").status, 2);
  EXPECT_EQ(bdsw("run --mode qubit").status, 2);
  EXPECT_EQ(bdsw("run --n 2").status, 2);
  EXPECT_EQ(bdsw("sweep --delta-b-grid ''").status, 2);
  EXPECT_EQ(bdsw("frobnicate").status, 2);
}

TEST(Cli, PairedPrepareMeasureMatchesEntanglement) {
  const auto ent = records(bdsw("run --n 512 --delta-b 0.03 --delta-p 0.03 --seed 7").out);
  const auto o = bdsw("run --n 512 --delta-b 0.03 --delta-p 0.03 --mode pm --paired-seed 7");
  ASSERT_EQ(o.status, 0);
  const auto pm = records(o.out);
  ASSERT_EQ(ent.size(), 1u);
  ASSERT_EQ(pm.size(), 1u);
  expect_record_schema(pm[0]);
  EXPECT_EQ(pm[0]["mode"], "pm");
  EXPECT_EQ(pm[0]["key_hex"], ent[0]["key_hex"]);
  EXPECT_TRUE(pm[0]["paired_match"].get<bool>());
}

TEST(Cli, CsvHasFixedHeader) {
  const auto o = bdsw("run --n 256 --seed 1 --runs 2 --format csv");
  ASSERT_EQ(o.status, 0);
  std::istringstream in(o.out);
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("seed,mode,n,delta_b,delta_p,tag_fraction,test_fraction,sampling,", 0), 0u);
  std::size_t rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  }
  EXPECT_EQ(rows, 2u);
}

TEST(Cli, SweepFormulaRateFallsWithTagFraction) {
  const auto o = bdsw("sweep --n 1024 --delta-b-grid 0.05 --delta-p-grid 0.05 --tag-grid 0,0.05,0.1 --seed 3");
  const auto r = records(o.out);
  ASSERT_EQ(r.size(), 3u);
  for (const auto& j : r) expect_record_schema(j);
  EXPECT_GE(r[0]["formula_rate"].get<double>(), r[1]["formula_rate"].get<double>());
  EXPECT_GE(r[1]["formula_rate"].get<double>(), r[2]["formula_rate"].get<double>());
}

TEST(Cli, SweepSinglePointEqualsRun) {
  const auto s = records(bdsw("sweep --n 512 --delta-b-grid 0.04 --delta-p-grid 0.04 --tag-grid 0 --seed 5").out);
  const auto r = records(bdsw("run --n 512 --delta-b 0.04 --delta-p 0.04 --seed 5").out);
  ASSERT_EQ(s.size(), 1u);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(without_timing(s[0]), without_timing(r[0]));
}

TEST(Cli, SweepAcrossZeroRateFlagsAborts) {
  const auto r = records(bdsw("sweep --n 512 --delta-b-grid 0.02,0.2 --delta-p-grid 0.2 --tag-grid 0 --seed 5").out);
  ASSERT_EQ(r.size(), 2u);
  const auto& bad = r[1];
  expect_record_schema(bad);
  EXPECT_EQ(bad["abort_reason"], "no_key");
  EXPECT_EQ(bad["key_hex"], "");
}

TEST(Cli, VerifyPassesAndCatchesInjectedFault) {
  EXPECT_EQ(bdsw("verify --max-pairs 3 --trials 20000").status, 0);
  const auto bad = bdsw("verify --max-pairs 2 --trials 20000 --inject-fault bicnot");
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.out.find("bicnot"), std::string::npos);
}
