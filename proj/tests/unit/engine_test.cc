// Copyright 2026 The QJoin Authors.
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

#include <sstream>

#include "qjoin/engine.h"
#include "qjoin/error.h"
#include "test_util.h"

namespace qjoin {
namespace {

using testing::TempDir;
using testing::fixture;
using testing::read_file;

TEST(Engine, DiscoverIsDeterministic) {
  TempDir dir("engine_discover");
  std::ostringstream log;
  const auto s = cmd_discover(fixture("names/repo"), {}, dir.path() / "a", log);
  cmd_discover(fixture("names/repo"), {}, dir.path() / "b", log);
  EXPECT_EQ(s.tables, 2u);
  EXPECT_GE(s.tasks, 1u);
  EXPECT_EQ(read_file(dir.path() / "a/tasks.csv"), read_file(dir.path() / "b/tasks.csv"));
  EXPECT_EQ(read_file(dir.path() / "a/tasks.csv"), read_file(fixture("names/tasks.csv")));
  EXPECT_EQ(read_file(dir.path() / "a/clusters.csv"), read_file(dir.path() / "b/clusters.csv"));
  EXPECT_NE(log.str().find("tasks="), std::string::npos);
}

TEST(Engine, DiscoverRejectsEmptyDirectory) {
  TempDir dir("engine_empty");
  std::ostringstream log;
  EXPECT_THROW(cmd_discover(dir.path(), {}, dir.path() / "out", log), Error);
}

TEST(Engine, JoinScoresAndReusesOnSecondRun) {
  TempDir dir("engine_join");
  std::ostringstream log;
  JoinOptions opt;
  opt.library = dir.path() / "lib.jsonl";
  opt.truth_dir = fixture("names/truth");
  const auto first = cmd_join(fixture("names/repo"), fixture("names/tasks.csv"), {}, opt,
                              dir.path() / "run1", log);
  ASSERT_EQ(first.tasks.size(), 1u);
  EXPECT_EQ(first.failed, 0u);
  EXPECT_EQ(first.reuse_hits, 0u);
  EXPECT_GE(first.total_iterations, 1);
  const TaskOutcome& t = first.tasks[0];
  ASSERT_TRUE(t.metrics.has_value());
  EXPECT_EQ(t.metrics->f1, 1.0);
  EXPECT_TRUE(t.stored);
  EXPECT_EQ(t.chain_a.size(), 2u);

  opt.reuse = ReuseMode::kOneShot;
  const auto second = cmd_join(fixture("names/repo"), fixture("names/tasks.csv"), {}, opt,
                               dir.path() / "run2", log);
  EXPECT_EQ(second.reuse_hits, 1u);
  EXPECT_EQ(second.total_iterations, 0);
  EXPECT_EQ(second.tasks[0].metrics->f1, 1.0);
  EXPECT_EQ(read_file(dir.path() / "run1/tasks/000/joined.csv"),
            read_file(dir.path() / "run2/tasks/000/joined.csv"));
  const std::string report = read_file(dir.path() / "run2/report.csv");
  EXPECT_EQ(report.rfind("task,t_a,c_a,t_b,c_b,status,", 0), 0u);
  EXPECT_NE(read_file(dir.path() / "run2/metrics.txt").find("reuse_hits=1"), std::string::npos);
}

TEST(Engine, ReuseSavesIterationsOnTwoCopies) {
  TempDir dir("engine_two");
  const std::string tasks_head = "t_a,c_a,t_b,c_b,j_hat,folder,group,cluster\n";
  std::string tasks = tasks_head;
  for (const std::string i : {"1", "2"}) {
    testing::write_file(dir.path() / ("repo/ce" + i + ".csv"),
                        read_file(fixture("names/repo/campaign_expenditures.csv")));
    testing::write_file(dir.path() / ("repo/fp" + i + ".csv"),
                        read_file(fixture("names/repo/funds_payments.csv")));
    tasks += "ce" + i + ",CANDLAST,fp" + i + ",CANDNAME,1,else_names,0,0\n";
  }
  testing::write_file(dir.path() / "tasks.csv", tasks);
  std::ostringstream log;
  const auto off = cmd_join(dir.path() / "repo", dir.path() / "tasks.csv", {}, {},
                            dir.path() / "off", log);
  JoinOptions opt;
  opt.reuse = ReuseMode::kOneShot;
  opt.library = dir.path() / "lib.jsonl";
  const auto on = cmd_join(dir.path() / "repo", dir.path() / "tasks.csv", {}, opt,
                           dir.path() / "on", log);
  EXPECT_LT(on.total_iterations, off.total_iterations);
  EXPECT_EQ(on.reuse_hits, 1u);
}

TEST(Engine, BenchReportShape) {
  std::ostringstream report, log;
  const auto s = cmd_bench(fixture("bench"), {}, report, log);
  ASSERT_EQ(s.cases.size(), 3u);
  EXPECT_TRUE(s.skipped.empty());
  std::istringstream lines(report.str());
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "case,source_column,target_column,chain_a,chain_b,matches,precision,recall,f1");
  EXPECT_EQ(rows[4].rfind("average,", 0), 0u);
  double f1 = 0.0;
  for (const auto& c : s.cases) f1 += c.metrics.f1;
  EXPECT_NEAR(s.average.f1, f1 / 3.0, 1e-12);
}

TEST(Engine, BenchSkipsIncompleteCase) {
  TempDir dir("engine_bench_skip");
  testing::write_file(dir.path() / "broken/source.csv", "x\nabc\n");
  std::ostringstream report, log;
  const auto s = cmd_bench(dir.path(), {}, report, log);
  EXPECT_TRUE(s.cases.empty());
  EXPECT_EQ(s.skipped, (std::vector<std::string>{"broken"}));
}

}  // namespace
}  // namespace qjoin
