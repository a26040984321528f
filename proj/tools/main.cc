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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "qjoin/config.h"
#include "qjoin/engine.h"
#include "qjoin/error.h"

namespace {

qjoin::EngineConfig make_config(const std::string& path, const std::optional<std::uint64_t>& seed) {
  qjoin::EngineConfig cfg = path.empty() ? qjoin::EngineConfig{} : qjoin::load_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qjoin: transformation-aware join discovery"};
  app.require_subcommand(1);

  std::string repo, config, out, tasks, library, truth_dir, bench_dir, reuse = "off";
  std::optional<std::uint64_t> seed;

  auto* discover = app.add_subcommand("discover", "Find join tasks in a CSV repository");
  discover->add_option("--repo", repo, "Directory of CSV tables")->required();
  discover->add_option("--out", out, "Output directory")->required();

  auto* join = app.add_subcommand("join", "Learn chains and join every task");
  join->add_option("--repo", repo, "Directory of CSV tables")->required();
  join->add_option("--tasks", tasks, "tasks.csv from discover")->required();
  join->add_option("--out", out, "Output directory")->required();
  join->add_option("--reuse", reuse, "Reuse mode")
      ->check(CLI::IsMember({"off", "one-shot", "sequential"}));
  join->add_option("--library", library, "Reuse library file");
  join->add_option("--truth-dir", truth_dir, "Ground truth per table pair");

  auto* bench = app.add_subcommand("bench", "Score a benchmark directory");
  bench->add_option("--bench-dir", bench_dir, "Directory of cases")->required();
  bench->add_option("--out", out, "Report file (default: stdout)");

  auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

  for (auto* sub : {discover, join, bench}) {
    sub->add_option("--config", config, "JSON configuration file");
    sub->add_option("--seed", seed, "Global seed");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (defaults->parsed()) {
      std::cout << qjoin::EngineConfig{}.to_json() << '\n';
      return 0;
    }
    const qjoin::EngineConfig cfg = make_config(config, seed);
    if (discover->parsed()) {
      qjoin::cmd_discover(repo, cfg, out, std::cout);
      return 0;
    }
    if (join->parsed()) {
      qjoin::JoinOptions opt;
      opt.reuse = qjoin::parse_reuse_mode(reuse);
      if (!library.empty()) opt.library = library;
      if (!truth_dir.empty()) opt.truth_dir = truth_dir;
      const auto summary = qjoin::cmd_join(repo, tasks, cfg, opt, out, std::cerr);
      std::cout << "tasks=" << summary.tasks.size() << " failed=" << summary.failed
                << " iterations=" << summary.total_iterations
                << " reuse_hits=" << summary.reuse_hits << '\n';
      return summary.all_failed() ? 1 : 0;
    }
    if (bench->parsed()) {
      if (out.empty()) {
        qjoin::cmd_bench(bench_dir, cfg, std::cout, std::cerr);
      } else {
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        if (!f) throw qjoin::Error("cannot write " + out);
        qjoin::cmd_bench(bench_dir, cfg, f, std::cerr);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
