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

#include "qjoin/reward.h"

#include <algorithm>
#include <map>

#include "qjoin/error.h"

namespace qjoin {

AlcsGain alcs_gain(const AlcsMatrix& prev, const AlcsMatrix& next) {
  if (prev.row_count() != next.row_count()) {
    throw Error("ALCS gain needs matrices over the same source rows");
  }
  AlcsGain g;
  const std::size_t m = prev.row_count();
  if (m == 0) return g;
  std::size_t improved = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = next.row_max[i] - prev.row_max[i];
    g.delta += d;
    if (d > 0.0) ++improved;
  }
  g.p = static_cast<double>(improved) / static_cast<double>(m);
  return g;
}

std::vector<std::size_t> best_match_counts(const AlcsMatrix& m) {
  std::map<std::string_view, std::size_t> freq;
  for (std::size_t i = 0; i < m.row_count(); ++i) ++freq[m.best_match(i)];
  std::vector<std::size_t> f(m.row_count());
  for (std::size_t i = 0; i < m.row_count(); ++i) f[i] = freq[m.best_match(i)];
  return f;
}

std::size_t duplicate_score(const AlcsMatrix& m) {
  std::size_t phi = 0;
  for (std::size_t f : best_match_counts(m)) phi += f > 0 ? f - 1 : 0;
  return phi;
}

double uniqueness_fraction(const AlcsMatrix& prev, const AlcsMatrix& next) {
  if (prev.row_count() != next.row_count()) {
    throw Error("uniqueness fraction needs matrices over the same rows");
  }
  if (prev.row_count() == 0) return 1.0;
  const auto fp = best_match_counts(prev);
  const auto fn = best_match_counts(next);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < fp.size(); ++i) ok += fn[i] <= fp[i];
  return static_cast<double>(ok) / static_cast<double>(fp.size());
}

DupChange duplicate_change(const AlcsMatrix& prev, const AlcsMatrix& next) {
  return {duplicate_score(prev), duplicate_score(next),
          uniqueness_fraction(prev, next)};
}

double uniqueness_reward(std::size_t phi_prev, std::size_t phi_new,
                         const RewardConfig& cfg, double p_uniq,
                         double uniq_weight) {
  if (phi_prev == 0) return 0.0;
  if (p_uniq < cfg.min_uniq_fraction) return 0.0;
  const double dup = (static_cast<double>(phi_new) - static_cast<double>(phi_prev)) /
                     static_cast<double>(phi_prev);
  return -uniq_weight * dup;
}

double uniqueness_reward(std::size_t phi_prev, std::size_t phi_new,
                         const RewardConfig& cfg, double p_uniq) {
  return uniqueness_reward(phi_prev, phi_new, cfg, p_uniq, cfg.uniq_weight);
}

Weights default_weights(const RewardConfig& cfg) {
  return {cfg.alcs_weight, cfg.uniq_weight, false};
}

Weights adaptive_weights(const std::vector<double>& sims,
                         const RewardConfig& cfg) {
  if (sims.empty()) return default_weights(cfg);
  const double top = *std::max_element(sims.begin(), sims.end());
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  for (double s : sims) {
    n1 += s > cfg.tau_high;
    n2 += (top - s) > cfg.tau_diff;
  }
  if (std::max(n1, n2) == 1) {
    return {cfg.alcs_weight_high, cfg.uniq_weight_low, true};
  }
  return default_weights(cfg);
}

RewardBreakdown composite_reward(const AlcsGain& gain, const DupChange& dup,
                                 double op_cost, const Weights& weights,
                                 int step, const RewardConfig& cfg) {
  RewardBreakdown r;
  r.delta_alcs = gain.delta;
  r.p_alcs = gain.p;
  r.phi_prev = dup.phi_prev;
  r.phi_new = dup.phi_new;
  r.p_uniq = dup.p_uniq;
  r.delta_dup = dup.phi_prev == 0
                    ? 0.0
                    : (static_cast<double>(dup.phi_new) -
                       static_cast<double>(dup.phi_prev)) /
                          static_cast<double>(dup.phi_prev);
  r.alcs_gate = gain.p >= cfg.min_alcs_fraction;
  r.uniq_gate = dup.p_uniq >= cfg.min_uniq_fraction;
  if (r.alcs_gate) r.r_alcs = weights.alcs * gain.delta;
  if (r.uniq_gate) {
    r.r_uniq = uniqueness_reward(dup.phi_prev, dup.phi_new, cfg, dup.p_uniq,
                                 weights.uniq);
    if (r.r_uniq > 0.0 && !r.alcs_gate) r.r_uniq = 0.0;
  }
  r.op_cost = op_cost;
  r.step_pen = cfg.step_penalty * static_cast<double>(step);
  r.total = r.r_alcs + r.r_uniq - r.op_cost - r.step_pen;
  return r;
}

RewardBreakdown composite_reward(const AlcsGain& gain, const DupChange& dup,
                                 OpClass op_class, const Weights& weights,
                                 int step, const RewardConfig& cfg) {
  return composite_reward(gain, dup, cfg.op_cost(op_class), weights, step, cfg);
}

}  // namespace qjoin
