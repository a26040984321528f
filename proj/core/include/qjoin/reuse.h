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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qjoin/agent.h"
#include "qjoin/corpus.h"
#include "qjoin/operators.h"
#include "qjoin/reward.h"

namespace qjoin {

struct ReuseEntry {
  OperatorChain chain_a;
  OperatorChain chain_b;
  int cluster_id = -1;
  std::string folder;
  std::vector<double> features;
  std::vector<double> reward_trace;
  double reward = 0.0;  // value on the origin pair
  QTable q;
  PolicyTable policy;
  ColumnRef source;
  ColumnRef target;
  std::uint64_t sequence = 0;  // insertion order, used instead of wall time

  std::string provenance_key() const { return source.key() + "|" + target.key(); }
};

enum class StoreResult { kAdded, kReplaced, kIgnored };

inline constexpr const char* kLibraryHeader = "# qjoin-reuse-library v1";

class ReuseLibrary {
 public:
  // An entry for a known provenance key replaces the old one only when its
  // reward is higher.
  StoreResult store(ReuseEntry entry);

  const std::vector<ReuseEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::vector<const ReuseEntry*> for_cluster(int cluster_id) const;
  // Euclidean distance on the feature signature; first entry wins ties.
  const ReuseEntry* closest(const std::vector<double>& features) const;

  void write(std::ostream& out) const;
  static ReuseLibrary read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  // A missing file yields an empty library.
  static ReuseLibrary load(const std::filesystem::path& path);

 private:
  std::vector<ReuseEntry> entries_;
  std::uint64_t next_sequence_ = 1;
};

// Column-pair summary used by the best-pair fold.
struct PairSummary {
  std::string key;
  double mean_max = 0.0;  // mean row max ALCS
  double dup_rate = 0.0;  // duplicate score / rows
};

// Reward of moving from `incumbent` to `challenger`.
double pair_switch_reward(const PairSummary& incumbent,
                          const PairSummary& challenger,
                          const RewardConfig& cfg);

// Left fold: the challenger replaces the incumbent only on strictly positive
// switch reward. Returns the index of the survivor.
std::size_t select_best_pair(const std::vector<PairSummary>& pairs,
                             const RewardConfig& cfg);

// cluster id -> column pairs in that cluster
using ClusterMap = std::map<int, std::vector<std::pair<ColumnRef, ColumnRef>>>;

// Replacement candidates for a chain column missing from the learning pair's
// table: the cluster linking the stored pair's other side with the missing
// column supplies every column of the learning table paired in it.
std::vector<ColumnRef> find_equivalent_replacements(
    const ClusterMap& clusters,
    const std::pair<ColumnRef, ColumnRef>& learning_pair,
    const std::pair<ColumnRef, ColumnRef>& stored_pair,
    const ColumnRef& missing_column);

enum class ReuseMode { kOff, kOneShot, kSequential };
std::string reuse_mode_name(ReuseMode m);
ReuseMode parse_reuse_mode(std::string_view s);

struct ReuseConfig {
  std::size_t max_replacements = 32;
  bool validate_reverse = true;
};

struct ReuseOutcome {
  ReuseMode mode = ReuseMode::kOff;
  bool hit = false;
  std::optional<std::pair<OperatorChain, OperatorChain>> accepted_chain;
  double reward_delta = 0.0;
  bool fell_back_to_training = false;
  std::size_t steps_accepted = 0;
  const ReuseEntry* entry = nullptr;  // entry that produced the hit
};

// Tries the library entries of `cluster_id` on the workspace pair. One-shot
// applies each candidate chain whole and keeps the best positive value;
// sequential replays a stored chain step by step and stops at the first
// step whose reward is not positive. A miss sets fell_back_to_training.
ReuseOutcome apply_reuse(const Workspace& ws,
                         const std::pair<ColumnRef, ColumnRef>& pair,
                         int cluster_id, const ReuseLibrary& library,
                         ReuseMode mode, const ReuseConfig& cfg,
                         const ClusterMap* clusters = nullptr);

// Replays chains step by step; returns how many steps had positive reward
// before the first that did not, the resulting configuration and the sum of
// the accepted step rewards.
struct SequentialReplay {
  std::size_t accepted = 0;
  double reward = 0.0;
  Configuration config;
};
SequentialReplay replay_sequential(const Workspace& ws, const OperatorChain& a,
                                   const OperatorChain& b);

}  // namespace qjoin
