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

#include <cstddef>
#include <vector>

#include "qjoin/operators.h"
#include "qjoin/similarity.h"

namespace qjoin {

struct RewardConfig {
  double alcs_weight = 1.0;
  double uniq_weight = 1.0;
  double alcs_weight_high = 2.0;
  double uniq_weight_low = 0.5;
  double min_alcs_fraction = 0.25;
  double min_uniq_fraction = 0.5;
  double tau_high = 0.7;
  double tau_diff = 0.3;
  double step_penalty = 0.05;
  double unary_cost = 0.0;
  double concat_cost = 0.02;

  double op_cost(OpClass c) const {
    return c == OpClass::kConcat ? concat_cost : unary_cost;
  }
};

struct AlcsGain {
  double delta = 0.0;  // sum of per-row changes in the row maximum
  double p = 0.0;      // fraction of rows whose maximum increased
};

// Throws Error when the matrices have different row counts.
AlcsGain alcs_gain(const AlcsMatrix& prev, const AlcsMatrix& next);

// f(x_i) for every row: how many rows share row i's best-match target value.
std::vector<std::size_t> best_match_counts(const AlcsMatrix& m);

// Sum over rows of max(0, f(x_i) - 1).
std::size_t duplicate_score(const AlcsMatrix& m);

// Fraction of rows whose best-match count did not grow.
double uniqueness_fraction(const AlcsMatrix& prev, const AlcsMatrix& next);

struct DupChange {
  std::size_t phi_prev = 0;
  std::size_t phi_new = 0;
  double p_uniq = 1.0;
};

DupChange duplicate_change(const AlcsMatrix& prev, const AlcsMatrix& next);

// -alpha_uniq * relative growth of the duplicate score, or 0 when the gate
// fails or the previous score was 0.
double uniqueness_reward(std::size_t phi_prev, std::size_t phi_new,
                         const RewardConfig& cfg, double p_uniq,
                         double uniq_weight);
double uniqueness_reward(std::size_t phi_prev, std::size_t phi_new,
                         const RewardConfig& cfg, double p_uniq);

struct Weights {
  double alcs = 1.0;
  double uniq = 1.0;
  bool boosted = false;
};

// Boosted weights when exactly one candidate dominates, defaults otherwise.
Weights adaptive_weights(const std::vector<double>& candidate_sims,
                         const RewardConfig& cfg);
Weights default_weights(const RewardConfig& cfg);

struct RewardBreakdown {
  double delta_alcs = 0.0;
  double p_alcs = 0.0;
  std::size_t phi_prev = 0;
  std::size_t phi_new = 0;
  double delta_dup = 0.0;
  double p_uniq = 0.0;
  double r_alcs = 0.0;
  double r_uniq = 0.0;
  double op_cost = 0.0;
  double step_pen = 0.0;
  double total = 0.0;
  bool alcs_gate = false;
  bool uniq_gate = false;
};

// total = gated r_alcs + gated r_uniq - op_cost - step_penalty * step. A
// uniqueness bonus (positive r_uniq) is only paid when the alignment gate
// also passes, so a step cannot earn reward purely by reshuffling matches.
RewardBreakdown composite_reward(const AlcsGain& gain, const DupChange& dup,
                                 double op_cost, const Weights& weights,
                                 int step, const RewardConfig& cfg);
RewardBreakdown composite_reward(const AlcsGain& gain, const DupChange& dup,
                                 OpClass op_class, const Weights& weights,
                                 int step, const RewardConfig& cfg);

}  // namespace qjoin
