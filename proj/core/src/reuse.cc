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

#include "qjoin/reuse.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>

#include "qjoin/error.h"

namespace qjoin {

using nlohmann::json;

StoreResult ReuseLibrary::store(ReuseEntry entry) {
  for (auto& e : entries_) {
    if (e.provenance_key() != entry.provenance_key()) continue;
    if (entry.reward > e.reward) {
      entry.sequence = next_sequence_++;
      e = std::move(entry);
      return StoreResult::kReplaced;
    }
    return StoreResult::kIgnored;
  }
  entry.sequence = next_sequence_++;
  entries_.push_back(std::move(entry));
  return StoreResult::kAdded;
}

std::vector<const ReuseEntry*> ReuseLibrary::for_cluster(int cluster_id) const {
  std::vector<const ReuseEntry*> out;
  for (const auto& e : entries_) {
    if (e.cluster_id == cluster_id) out.push_back(&e);
  }
  return out;
}

const ReuseEntry* ReuseLibrary::closest(const std::vector<double>& features) const {
  const ReuseEntry* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& e : entries_) {
    double d = 0.0;
    const std::size_t n = std::max(features.size(), e.features.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double x = i < features.size() ? features[i] : 0.0;
      const double y = i < e.features.size() ? e.features[i] : 0.0;
      d += (x - y) * (x - y);
    }
    if (d < best_d) {
      best_d = d;
      best = &e;
    }
  }
  return best;
}

namespace {

json ref_json(const ColumnRef& r) { return {{"table", r.table}, {"column", r.column}}; }

ColumnRef ref_from(const json& j) {
  return {j.at("table").get<std::string>(), j.at("column").get<std::string>()};
}

json entry_json(const ReuseEntry& e) {
  json j;
  j["chain_a"] = e.chain_a.text();
  j["chain_b"] = e.chain_b.text();
  j["cluster"] = e.cluster_id;
  j["folder"] = e.folder;
  j["features"] = e.features;
  j["trace"] = e.reward_trace;
  j["reward"] = e.reward;
  j["q"] = e.q.q;
  j["policy"] = e.policy.probs;
  j["source"] = ref_json(e.source);
  j["target"] = ref_json(e.target);
  j["sequence"] = e.sequence;
  return j;
}

ReuseEntry entry_from(const json& j) {
  ReuseEntry e;
  e.chain_a = parse_chain(j.at("chain_a").get<std::string>());
  e.chain_b = parse_chain(j.at("chain_b").get<std::string>());
  e.cluster_id = j.at("cluster").get<int>();
  e.folder = j.value("folder", "");
  e.features = j.at("features").get<std::vector<double>>();
  e.reward_trace = j.at("trace").get<std::vector<double>>();
  e.reward = j.at("reward").get<double>();
  e.q.q = j.at("q").get<std::map<std::string, std::map<std::string, double>>>();
  e.policy.probs = j.at("policy").get<std::map<std::string, std::map<std::string, double>>>();
  e.source = ref_from(j.at("source"));
  e.target = ref_from(j.at("target"));
  e.sequence = j.at("sequence").get<std::uint64_t>();
  return e;
}

}  // namespace

void ReuseLibrary::write(std::ostream& out) const {
  out << kLibraryHeader << '\n';
  for (const auto& e : entries_) out << entry_json(e).dump() << '\n';
}

ReuseLibrary ReuseLibrary::read(std::istream& in) {
  ReuseLibrary lib;
  std::string line;
  if (!std::getline(in, line)) return lib;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLibraryHeader) {
    throw Error("not a reuse library (expected header '" + std::string(kLibraryHeader) + "')");
  }
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      ReuseEntry e = entry_from(json::parse(line));
      lib.next_sequence_ = std::max(lib.next_sequence_, e.sequence + 1);
      lib.entries_.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw Error("reuse library line " + std::to_string(n) + ": " + ex.what());
    }
  }
  return lib;
}

void ReuseLibrary::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write reuse library " + path.string());
    write(out);
  }
  std::filesystem::rename(tmp, path);
}

ReuseLibrary ReuseLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return read(in);
}

double pair_switch_reward(const PairSummary& x, const PairSummary& y,
                          const RewardConfig& cfg) {
  const double r_alcs = y.mean_max - x.mean_max;
  const double r_uniq = x.dup_rate > 0.0 ? -(y.dup_rate - x.dup_rate) / x.dup_rate : 0.0;
  return cfg.alcs_weight * r_alcs + cfg.uniq_weight * r_uniq;
}

std::size_t select_best_pair(const std::vector<PairSummary>& pairs,
                             const RewardConfig& cfg) {
  if (pairs.empty()) throw Error("select_best_pair needs at least one pair");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pair_switch_reward(pairs[best], pairs[i], cfg) > 0.0) best = i;
  }
  return best;
}

std::vector<ColumnRef> find_equivalent_replacements(
    const ClusterMap& clusters,
    const std::pair<ColumnRef, ColumnRef>& learning,
    const std::pair<ColumnRef, ColumnRef>& stored, const ColumnRef& missing) {
  const bool source_side = missing.table == stored.first.table;
  const ColumnRef& other = source_side ? stored.second : stored.first;
  const ColumnRef& slot = source_side ? learning.first : learning.second;
  for (const auto& [id, pairs] : clusters) {
    const bool links = std::any_of(pairs.begin(), pairs.end(), [&](const auto& p) {
      return (p.first == other && p.second == missing) ||
             (p.first == missing && p.second == other);
    });
    if (!links) continue;
    std::set<ColumnRef> found;
    for (const auto& p : pairs) {
      for (const ColumnRef* c : {&p.first, &p.second}) {
        if (c->table == slot.table && *c != missing && *c != slot) found.insert(*c);
      }
    }
    return {found.begin(), found.end()};
  }
  return {};
}

std::string reuse_mode_name(ReuseMode m) {
  switch (m) {
    case ReuseMode::kOff: return "off";
    case ReuseMode::kOneShot: return "one-shot";
    case ReuseMode::kSequential: return "sequential";
  }
  return "off";
}

ReuseMode parse_reuse_mode(std::string_view s) {
  if (s == "off") return ReuseMode::kOff;
  if (s == "one-shot" || s == "one_shot") return ReuseMode::kOneShot;
  if (s == "sequential") return ReuseMode::kSequential;
  throw Error("unknown reuse mode: " + std::string(s));
}

SequentialReplay replay_sequential(const Workspace& ws, const OperatorChain& a,
                                   const OperatorChain& b) {
  SequentialReplay out;
  out.config = ws.raw();
  const auto slots = ws.slots();
  const auto actions = enumerate_actions(slots, {}, *ws.config().library);
  const RewardConfig& rc = ws.config().reward;
  std::vector<std::pair<int, const ChainStep*>> steps;
  for (const auto& s : a.steps) steps.push_back({0, &s});
  for (const auto& s : b.steps) steps.push_back({1, &s});
  for (const auto& [side, step] : steps) {
    Configuration next = ws.apply(out.config, side, *step);
    const OpClass cls = step->op.op_class();
    const Weights w = cls == OpClass::kConcat
                          ? adaptive_weights(ws.concat_sims(out.config, side, actions), rc)
                          : default_weights(rc);
    const RewardBreakdown r =
        ws.step_reward(out.config, next, cls, w, static_cast<int>(next.depth()));
    if (r.total <= 0.0) break;
    out.config = std::move(next);
    out.reward += r.total;
    ++out.accepted;
  }
  return out;
}

namespace {

// Candidate chain pairs for an entry, with missing partners substituted.
std::vector<std::pair<OperatorChain, OperatorChain>> bind_entry(
    const Workspace& ws, const std::pair<ColumnRef, ColumnRef>& pair,
    const ReuseEntry& e, const ReuseConfig& cfg, const ClusterMap* clusters) {
  OperatorChain a = e.chain_a;
  OperatorChain b = e.chain_b;
  a.base = pair.first.column;
  b.base = pair.second.column;

  // (side, partner name) of every missing partner and its options.
  std::vector<std::pair<int, std::string>> missing;
  std::vector<std::vector<std::string>> options;
  for (int side : {0, 1}) {
    const OperatorChain& ch = side == 0 ? a : b;
    const Table& t = side == 0 ? ws.source_rows() : ws.target_rows();
    const ColumnRef& origin = side == 0 ? e.source : e.target;
    for (const auto& col : ch.columns()) {
      if (col == ch.base || t.find(col)) continue;
      if (std::find(missing.begin(), missing.end(), std::make_pair(side, col)) != missing.end()) {
        continue;
      }
      std::vector<std::string> names;
      if (clusters) {
        for (const auto& r : find_equivalent_replacements(
                 *clusters, pair, {e.source, e.target}, {origin.table, col})) {
          if (t.find(r.column)) names.push_back(r.column);
        }
      }
      if (names.empty()) return {};
      missing.push_back({side, col});
      options.push_back(std::move(names));
    }
  }

  std::vector<std::pair<OperatorChain, OperatorChain>> out;
  std::vector<std::size_t> pick(missing.size(), 0);
  while (out.size() < cfg.max_replacements) {
    OperatorChain ca = a;
    OperatorChain cb = b;
    for (std::size_t m = 0; m < missing.size(); ++m) {
      OperatorChain& ch = missing[m].first == 0 ? ca : cb;
      for (auto& s : ch.steps) {
        if (s.op.op_class() == OpClass::kConcat && s.partner == missing[m].second) {
          s.partner = options[m][pick[m]];
        }
      }
    }
    out.push_back({std::move(ca), std::move(cb)});
    std::size_t m = 0;
    for (; m < pick.size(); ++m) {
      if (++pick[m] < options[m].size()) break;
      pick[m] = 0;
    }
    if (m == pick.size()) break;
  }
  return out;
}

}  // namespace

ReuseOutcome apply_reuse(const Workspace& ws,
                         const std::pair<ColumnRef, ColumnRef>& pair,
                         int cluster_id, const ReuseLibrary& library,
                         ReuseMode mode, const ReuseConfig& cfg,
                         const ClusterMap* clusters) {
  ReuseOutcome out;
  out.mode = mode;
  out.fell_back_to_training = true;
  if (mode == ReuseMode::kOff) return out;

  for (const ReuseEntry* e : library.for_cluster(cluster_id)) {
    for (const auto& [a, b] : bind_entry(ws, pair, *e, cfg, clusters)) {
      double reward = 0.0;
      std::size_t steps = 0;
      OperatorChain ka;
      OperatorChain kb;
      if (mode == ReuseMode::kOneShot) {
        reward = ws.value(ws.configure(a, b)).total;
        ka = a;
        kb = b;
        steps = a.size() + b.size();
      } else {
        const SequentialReplay rep = replay_sequential(ws, a, b);
        reward = rep.reward;
        ka = rep.config.a;
        kb = rep.config.b;
        steps = rep.accepted;
      }
      if (reward <= 0.0) continue;
      if (reward > out.reward_delta) {
        out.hit = true;
        out.fell_back_to_training = false;
        out.reward_delta = reward;
        out.accepted_chain = std::make_pair(ka, kb);
        out.steps_accepted = steps;
        out.entry = e;
      }
      break;  // first positive replacement is enough for this entry
    }
  }
  return out;
}

}  // namespace qjoin
