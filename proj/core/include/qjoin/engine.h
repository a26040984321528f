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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qjoin/config.h"
#include "qjoin/joiner.h"
#include "qjoin/pipeline.h"
#include "qjoin/reuse.h"

namespace qjoin {

struct DiscoverSummary {
  std::size_t tables = 0;
  std::size_t candidates = 0;
  std::size_t retained = 0;
  std::size_t kept = 0;
  std::size_t clusters = 0;
  std::size_t tasks = 0;
};

// Writes out/tasks.csv and out/clusters.csv.
DiscoverSummary cmd_discover(const std::filesystem::path& repo,
                             const EngineConfig& cfg,
                             const std::filesystem::path& out, std::ostream& log);

struct JoinOptions {
  ReuseMode reuse = ReuseMode::kOff;
  std::optional<std::filesystem::path> library;
  // Holds `<t_a>__<t_b>.csv` ground truth files (source_row,target_row).
  std::optional<std::filesystem::path> truth_dir;
};

struct TaskOutcome {
  JoinTask task;
  OperatorChain chain_a;
  OperatorChain chain_b;
  double reward = 0.0;
  int iterations = 0;
  bool reuse_hit = false;
  bool stored = false;
  JoinThreshold threshold;
  JoinResult join;
  std::optional<JoinMetrics> metrics;
  std::string error;  // non-empty when the task failed
};

struct JoinSummary {
  std::vector<TaskOutcome> tasks;
  std::size_t failed = 0;
  long long total_iterations = 0;
  std::size_t reuse_hits = 0;
  bool all_failed() const { return !tasks.empty() && failed == tasks.size(); }
};

// Learns (or reuses) chains for one task, joins the full columns and, when a
// library is given and reuse is on, stores the chains after validation.
TaskOutcome run_task(const Repository& repo, const JoinTask& task,
                     const EngineConfig& cfg, ReuseMode mode,
                     ReuseLibrary* library, const ClusterMap* clusters,
                     const TraceFn& trace = {});

// Runs every task of `tasks`; per-task output goes to out/tasks/NNN/, plus
// out/report.csv and out/metrics.txt. The library file, when given, is
// loaded first and saved at the end.
JoinSummary cmd_join(const std::filesystem::path& repo,
                     const std::filesystem::path& tasks, const EngineConfig& cfg,
                     const JoinOptions& options, const std::filesystem::path& out,
                     std::ostream& log);

struct BenchCase {
  std::string name;
  ColumnRef source;
  ColumnRef target;
  OperatorChain chain_a;
  OperatorChain chain_b;
  std::size_t matches = 0;
  JoinMetrics metrics;
};

struct BenchSummary {
  std::vector<BenchCase> cases;
  std::vector<std::string> skipped;
  JoinMetrics average;
};

// Each subdirectory holding source.csv, target.csv and ground_truth.csv is a
// case; a case without ground truth is skipped with a warning. Writes the
// per-case table and the average row to `report`.
BenchSummary cmd_bench(const std::filesystem::path& bench_dir,
                       const EngineConfig& cfg, std::ostream& report,
                       std::ostream& log);

// Sink for QJOIN_TRACE, or an empty function when the variable is unset.
TraceFn trace_from_env(std::ostream& log);

}  // namespace qjoin
