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

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "qjoin/corpus.h"
#include "qjoin/operators.h"
#include "qjoin/random.h"
#include "qjoin/reward.h"
#include "qjoin/similarity.h"

namespace qjoin {

struct AgentConfig {
  double learning_rate = 0.1;
  double discount = 1.0;
  double epsilon = 0.3;
  double epsilon_decay = 0.95;
  std::size_t max_depth = kDefaultMaxChainLen;
  double tau_sim = 0.95;
  double eps_tol = 1e-3;
  int patience = 5;
  int max_iterations = 100;
  std::array<double, 3> strata = {0.3, 0.3, 0.4};  // low, mid, high
  std::size_t top_k = 5;
  double sample_proportion = 0.5;
};

// Side names used as policy slots.
inline const char* side_name(int side) { return side == 0 ? "A" : "B"; }

class PolicyTable {
 public:
  // Uniform 1/K over the library for every slot.
  static PolicyTable uniform(const std::vector<std::string>& slots,
                             const std::vector<Operator>& library);

  double prob(const std::string& slot, const std::string& op_id) const;
  const std::map<std::string, double>& row(const std::string& slot) const;
  // Pr + a(1 - Pr) when reward > 0, Pr - a Pr otherwise, then renormalise.
  void update(const std::string& slot, const std::string& op_id, double reward,
              double alpha);

  std::map<std::string, std::map<std::string, double>> probs;
};

// Unnormalised policy step.
double policy_step(double pr, double alpha, double reward);

class QTable {
 public:
  double get(const std::string& state, const std::string& action) const;
  void set(const std::string& state, const std::string& action, double v);
  // Max over the given actions, missing entries reading as 0.
  double max_over(const std::string& state,
                  const std::vector<std::string>& actions) const;
  std::size_t size() const;

  std::map<std::string, std::map<std::string, double>> q;
};

// (1 - a) Q + a (R + g maxQ').
double q_update(double q, double alpha, double reward, double gamma,
                double max_next);

struct StateKey {
  std::string chain_a;
  std::string chain_b;
  int alcs_bucket = 0;
  int uniq_bucket = 0;
  std::size_t depth = 0;

  std::string text() const;
};

struct Agent {
  const std::vector<Operator>* library = nullptr;
  AgentConfig cfg;
  PolicyTable policy;
  QTable q;
  ExclusionDicts dicts;
  double epsilon = 0.0;
  Rng rng;
};

Agent init_agent(const std::vector<Operator>& library, const AgentConfig& cfg,
                 const QTable* warm_start, std::uint64_t seed);

// Applies both learning rules for one transition. `next_actions` are the
// action ids legal in the next state.
void update(Agent& agent, const StateKey& state, const std::string& slot,
            const std::string& op_id, const std::string& action_id,
            double reward, const StateKey& next,
            const std::vector<std::string>& next_actions);

// k-means (k = 3) strata over the row maxima; draws the configured share of
// each stratum. Fewer than 3 rows returns every row. Sorted indices.
std::vector<std::size_t> stratified_sample(const std::vector<double>& row_maxima,
                                           std::uint64_t seed,
                                           const AgentConfig& cfg);

struct TrainConfig {
  AgentConfig agent;
  RewardConfig reward;
  AlcsConfig alcs;
  const std::vector<Operator>* library = &default_library();
};

// A pair of derived columns over the working rows.
struct Configuration {
  OperatorChain a;
  OperatorChain b;
  std::vector<std::string> values_a;
  std::vector<std::string> values_b;
  std::shared_ptr<const AlcsMatrix> matrix;

  std::size_t depth() const { return a.size() + b.size(); }
};

struct StepEval {
  Configuration next;
  RewardBreakdown reward;
};

// Sampled working rows of one column pair plus a matrix cache. Source rows
// are the sampled non-empty rows of the source column (stratified when
// large); target rows are the sampled target rows, narrowed to each source
// row's best targets when large.
class Workspace {
 public:
  Workspace(const Table& source, const std::string& source_column,
            const Table& target, const std::string& target_column,
            const TrainConfig& cfg, std::uint64_t seed);

  const Table& source_rows() const { return src_; }
  const Table& target_rows() const { return tgt_; }
  const Configuration& raw() const { return raw_; }
  const TrainConfig& config() const { return cfg_; }
  std::vector<SlotState> slots() const;

  // Configuration after applying `step` on `side`. Throws MissingColumnError
  // for an unknown partner.
  Configuration apply(const Configuration& from, int side,
                      const ChainStep& step) const;
  Configuration configure(const OperatorChain& a, const OperatorChain& b) const;

  // Reward of one step, with `step_index` the resulting depth.
  RewardBreakdown step_reward(const Configuration& prev,
                              const Configuration& next, OpClass op_class,
                              const Weights& weights, int step_index) const;

  // Value of a whole configuration measured from the raw columns, with
  // default weights, summed operator costs and a penalty per step.
  RewardBreakdown value(const Configuration& c) const;

  // Mean row max of every concat action on `side`; input to adaptive weights.
  std::vector<double> concat_sims(const Configuration& from, int side,
                                  const std::vector<Action>& actions) const;

  std::size_t cache_size() const { return cache_.size(); }

 private:
  std::shared_ptr<const AlcsMatrix> matrix(const std::vector<std::string>& a,
                                           const std::vector<std::string>& b) const;

  TrainConfig cfg_;
  Table src_;
  Table tgt_;
  std::string src_col_;
  std::string tgt_col_;
  Configuration raw_;
  mutable std::unordered_map<std::string, std::shared_ptr<const AlcsMatrix>> cache_;
};

struct StepRecord {
  int episode = 0;
  std::string action;
  bool explored = false;
  bool accepted = false;
  double reward = 0.0;
  double best_evaluated = 0.0;  // exploitation only
};

struct TrainResult {
  OperatorChain chain_a;
  OperatorChain chain_b;
  double best_reward = 0.0;
  double final_alcs_mean = 0.0;
  int iterations = 0;
  std::vector<double> reward_trace;  // best value per episode
  std::vector<StepRecord> steps;
  QTable q;
  PolicyTable policy;
};

using TraceFn = std::function<void(const std::string&)>;

// Runs episodes until the best configuration reaches tau_sim, the best value
// stalls for `patience` episodes, or max_iterations episodes ran.
TrainResult train(const Workspace& ws, const TrainConfig& cfg,
                  const QTable* warm_start, std::uint64_t seed,
                  const TraceFn& trace = {});

// Convenience overload building the workspace. Throws UnusablePairError
// (naming the pair) when a side has no usable values.
TrainResult train(const std::pair<ColumnRef, ColumnRef>& pair,
                  const Repository& repo, const TrainConfig& cfg,
                  const QTable* warm_start, std::uint64_t seed,
                  const TraceFn& trace = {});

StateKey state_of(const Configuration& c);

}  // namespace qjoin
