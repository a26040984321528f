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

#include "qjoin/engine.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "qjoin/csv.h"
#include "qjoin/error.h"

namespace qjoin {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::string task_dir_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

std::optional<JoinMetrics> score_file(const fs::path& truth_path,
                                      const JoinResult& join) {
  std::ifstream in(truth_path, std::ios::binary);
  if (!in) return std::nullopt;
  return score_against_truth(join, read_truth_csv(in));
}

}  // namespace

TraceFn trace_from_env(std::ostream& log) {
  const char* v = std::getenv("QJOIN_TRACE");
  if (v == nullptr || *v == '\0' || std::string(v) == "0") return {};
  return [&log](const std::string& line) { log << "trace " << line << '\n'; };
}

DiscoverSummary cmd_discover(const fs::path& repo_path, const EngineConfig& cfg,
                             const fs::path& out, std::ostream& log) {
  const Repository repo = load_repository(repo_path);
  for (const auto& w : repo.warnings) log << "warning: " << w << '\n';
  const DiscoveryResult r = run_discovery(repo, cfg.pipeline_config());
  fs::create_directories(out);
  {
    auto f = open_out(out / "tasks.csv");
    write_tasks_csv(f, r.tasks);
  }
  {
    auto f = open_out(out / "clusters.csv");
    write_clusters_csv(f, r);
  }
  DiscoverSummary s;
  s.tables = repo.tables.size();
  s.candidates = r.candidates.size();
  s.retained = r.retained.size();
  for (bool k : r.kept) s.kept += k ? 1 : 0;
  s.clusters = r.clusters.cluster_count();
  s.tasks = r.tasks.size();
  log << "tables=" << s.tables << " candidates=" << s.candidates
      << " retained=" << s.retained << " kept=" << s.kept
      << " clusters=" << s.clusters << " tasks=" << s.tasks << '\n';
  return s;
}

TaskOutcome run_task(const Repository& repo, const JoinTask& task,
                     const EngineConfig& cfg, ReuseMode mode,
                     ReuseLibrary* library, const ClusterMap* clusters,
                     const TraceFn& trace) {
  TaskOutcome out;
  out.task = task;
  const Table& ta = repo.table(task.t_a);
  const Table& tb = repo.table(task.t_b);
  const TrainConfig tc = cfg.train_config();
  const Workspace ws(ta, task.c_a, tb, task.c_b, tc, cfg.seed);
  const auto pair = std::make_pair(task.a(), task.b());

  FeatureVector features{};
  if (library != nullptr) {
    Candidate c{task.a(), task.b(), task.j_hat, false};
    features = describe_pair(c, repo, cfg.pipeline_config()).features;
  }

  out.chain_a = ws.raw().a;
  out.chain_b = ws.raw().b;
  QTable q;
  PolicyTable policy;
  std::vector<double> reward_trace;
  ReuseOutcome ro;
  if (library != nullptr && mode != ReuseMode::kOff) {
    ro = apply_reuse(ws, pair, task.cluster, *library, mode, cfg.reuse, clusters);
  }
  if (ro.hit) {
    out.reuse_hit = true;
    out.chain_a = ro.accepted_chain->first;
    out.chain_b = ro.accepted_chain->second;
    q = ro.entry->q;
    policy = ro.entry->policy;
    reward_trace = ro.entry->reward_trace;
    if (trace) trace("reuse hit " + task.key() + " delta=" + format_number(ro.reward_delta));
  } else {
    const ReuseEntry* warm = nullptr;
    if (library != nullptr && mode != ReuseMode::kOff) {
      warm = library->closest({features.begin(), features.end()});
    }
    TrainResult tr = train(ws, tc, warm ? &warm->q : nullptr, cfg.seed, trace);
    out.chain_a = tr.chain_a;
    out.chain_b = tr.chain_b;
    out.iterations = tr.iterations;
    q = std::move(tr.q);
    policy = std::move(tr.policy);
    reward_trace = std::move(tr.reward_trace);
  }
  out.reward = ws.value(ws.configure(out.chain_a, out.chain_b)).total;

  const auto vals_a = compose_chain(out.chain_a, ta);
  const auto vals_b = compose_chain(out.chain_b, tb);
  const JoinerConfig jc = cfg.joiner_config();
  out.threshold = adaptive_threshold(vals_a, vals_b, jc);
  out.join = fuzzy_join(vals_a, vals_b, out.threshold, jc.alcs);

  if (library != nullptr && out.reward > 0.0) {
    bool valid = true;
    if (cfg.reuse.validate_reverse) {
      const Workspace rev(tb, task.c_b, ta, task.c_a, tc, cfg.seed);
      valid = rev.value(rev.configure(out.chain_b, out.chain_a)).total > 0.0;
      if (!valid && trace) trace("reverse validation failed " + task.key());
    }
    if (valid) {
      ReuseEntry e;
      e.chain_a = out.chain_a;
      e.chain_b = out.chain_b;
      e.cluster_id = task.cluster;
      e.folder = folder_name(task.folder);
      e.features.assign(features.begin(), features.end());
      e.reward_trace = std::move(reward_trace);
      e.reward = out.reward;
      e.q = std::move(q);
      e.policy = std::move(policy);
      e.source = task.a();
      e.target = task.b();
      out.stored = library->store(std::move(e)) != StoreResult::kIgnored;
    }
  }
  return out;
}

JoinSummary cmd_join(const fs::path& repo_path, const fs::path& tasks_path,
                     const EngineConfig& cfg, const JoinOptions& options,
                     const fs::path& out, std::ostream& log) {
  const Repository repo = load_repository(repo_path);
  for (const auto& w : repo.warnings) log << "warning: " << w << '\n';
  std::vector<JoinTask> tasks;
  {
    std::ifstream in(tasks_path, std::ios::binary);
    if (!in) throw Error("cannot read tasks file " + tasks_path.string());
    tasks = read_tasks_csv(in);
  }
  ClusterMap clusters;
  for (const auto& t : tasks) {
    if (t.cluster >= 0) clusters[t.cluster].emplace_back(t.a(), t.b());
  }
  ReuseLibrary library;
  if (options.library) library = ReuseLibrary::load(*options.library);
  ReuseLibrary* lib = options.library ? &library : nullptr;
  const TraceFn trace = trace_from_env(log);

  fs::create_directories(out / "tasks");
  JoinSummary summary;
  auto report = open_out(out / "report.csv");
  write_csv_row(report, {"task", "t_a", "c_a", "t_b", "c_b", "status", "chain_a",
                         "chain_b", "reward", "iterations", "reuse_hit", "stored",
                         "matches", "thr_join", "tolerance", "precision", "recall",
                         "f1"});
  double f1_sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const JoinTask& t = tasks[i];
    const std::string name = task_dir_name(i);
    TaskOutcome o;
    try {
      o = run_task(repo, t, cfg, options.reuse, lib, &clusters, trace);
      const fs::path dir = out / "tasks" / name;
      fs::create_directories(dir);
      {
        auto f = open_out(dir / "joined.csv");
        write_joined_csv(f, o.join);
      }
      {
        auto f = open_out(dir / "chain.txt");
        f << "a " << o.chain_a.text() << '\n' << "b " << o.chain_b.text() << '\n';
      }
      if (options.truth_dir) {
        o.metrics = score_file(*options.truth_dir / (t.t_a + "__" + t.t_b + ".csv"), o.join);
      }
    } catch (const Error& e) {
      o = TaskOutcome{};
      o.task = t;
      o.error = e.what();
      ++summary.failed;
      log << "task " << name << " (" << t.key() << ") failed: " << e.what() << '\n';
    }
    summary.total_iterations += o.iterations;
    summary.reuse_hits += o.reuse_hit ? 1 : 0;
    if (o.metrics) {
      f1_sum += o.metrics->f1;
      ++scored;
    }
    const bool ok = o.error.empty();
    write_csv_row(report,
                  {name, t.t_a, t.c_a, t.t_b, t.c_b, ok ? "ok" : "failed",
                   ok ? o.chain_a.text() : "", ok ? o.chain_b.text() : "",
                   format_number(o.reward), std::to_string(o.iterations),
                   o.reuse_hit ? "1" : "0", o.stored ? "1" : "0",
                   std::to_string(o.join.matches.size()),
                   format_number(o.threshold.thr_join),
                   format_number(o.threshold.tolerance),
                   o.metrics ? format_number(o.metrics->precision) : "",
                   o.metrics ? format_number(o.metrics->recall) : "",
                   o.metrics ? format_number(o.metrics->f1) : ""});
    if (ok) {
      log << "task " << name << " " << t.key() << " iterations=" << o.iterations
          << " reuse_hit=" << (o.reuse_hit ? 1 : 0)
          << " matches=" << o.join.matches.size() << '\n';
    }
    summary.tasks.push_back(std::move(o));
  }
  {
    auto m = open_out(out / "metrics.txt");
    m << "tasks=" << tasks.size() << '\n'
      << "failed=" << summary.failed << '\n'
      << "total_iterations=" << summary.total_iterations << '\n'
      << "reuse_hits=" << summary.reuse_hits << '\n'
      << "reuse_mode=" << reuse_mode_name(options.reuse) << '\n';
    if (scored > 0) {
      m << "scored=" << scored << '\n'
        << "mean_f1=" << format_number(f1_sum / static_cast<double>(scored)) << '\n';
    }
  }
  if (options.library) library.save(*options.library);
  return summary;
}

BenchSummary cmd_bench(const fs::path& bench_dir, const EngineConfig& cfg,
                       std::ostream& report, std::ostream& log) {
  if (!fs::is_directory(bench_dir)) {
    throw Error("benchmark directory not found: " + bench_dir.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(bench_dir)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());

  BenchSummary s;
  const PipelineConfig pc = cfg.pipeline_config();
  for (const auto& dir : dirs) {
    const std::string name = dir.filename().string();
    if (!fs::exists(dir / "source.csv") || !fs::exists(dir / "target.csv")) {
      log << "warning: skipping " << name << ": source.csv or target.csv missing\n";
      s.skipped.push_back(name);
      continue;
    }
    if (!fs::exists(dir / "ground_truth.csv")) {
      log << "warning: skipping " << name << ": ground_truth.csv missing\n";
      s.skipped.push_back(name);
      continue;
    }
    try {
      const Repository repo = load_repository(dir);
      const Table& src = repo.table("source");
      const Table& tgt = repo.table("target");
      // Column pair with the best pre-score; first pair wins ties.
      ColumnRef best_a{"source", src.columns.front().name};
      ColumnRef best_b{"target", tgt.columns.front().name};
      if (src.columns.size() > 1 || tgt.columns.size() > 1) {
        double best = -1.0;
        for (const auto& ca : src.columns) {
          for (const auto& cb : tgt.columns) {
            Candidate c{ca.ref(), cb.ref(), 0.0, false};
            double score = 0.0;
            try {
              score = describe_pair(c, repo, pc).score();
            } catch (const UnusablePairError&) {
              continue;
            }
            if (score > best) {
              best = score;
              best_a = ca.ref();
              best_b = cb.ref();
            }
          }
        }
      }
      JoinTask t;
      t.t_a = best_a.table;
      t.c_a = best_a.column;
      t.t_b = best_b.table;
      t.c_b = best_b.column;
      const TaskOutcome o = run_task(repo, t, cfg, ReuseMode::kOff, nullptr, nullptr);
      BenchCase bc;
      bc.name = name;
      bc.source = best_a;
      bc.target = best_b;
      bc.chain_a = o.chain_a;
      bc.chain_b = o.chain_b;
      bc.matches = o.join.matches.size();
      bc.metrics = *score_file(dir / "ground_truth.csv", o.join);
      s.cases.push_back(std::move(bc));
    } catch (const Error& e) {
      log << "warning: skipping " << name << ": " << e.what() << '\n';
      s.skipped.push_back(name);
    }
  }

  for (const auto& c : s.cases) {
    s.average.precision += c.metrics.precision;
    s.average.recall += c.metrics.recall;
    s.average.f1 += c.metrics.f1;
  }
  if (!s.cases.empty()) {
    const double n = static_cast<double>(s.cases.size());
    s.average.precision /= n;
    s.average.recall /= n;
    s.average.f1 /= n;
  }

  write_csv_row(report, {"case", "source_column", "target_column", "chain_a",
                         "chain_b", "matches", "precision", "recall", "f1"});
  for (const auto& c : s.cases) {
    write_csv_row(report, {c.name, c.source.column, c.target.column, c.chain_a.text(),
                           c.chain_b.text(), std::to_string(c.matches),
                           format_number(c.metrics.precision),
                           format_number(c.metrics.recall), format_number(c.metrics.f1)});
  }
  write_csv_row(report, {"average", "", "", "", "", "", format_number(s.average.precision),
                         format_number(s.average.recall), format_number(s.average.f1)});
  return s;
}

}  // namespace qjoin
