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

#include <algorithm>

#include "qjoin/error.h"
#include "qjoin/operators.h"
#include "qjoin/random.h"
#include "qjoin/reward.h"

namespace qjoin {
namespace {

// Matrix with given row maxima and best-match target values only.
AlcsMatrix fake(const std::vector<double>& maxima, const std::vector<std::string>& best) {
  AlcsMatrix m;
  m.rows.resize(maxima.size());
  std::vector<std::string> cols;
  for (const auto& b : best) {
    if (std::find(cols.begin(), cols.end(), b) == cols.end()) cols.push_back(b);
  }
  m.cols = cols;
  m.row_max = maxima;
  for (const auto& b : best) {
    m.row_argmax.push_back(static_cast<std::size_t>(
        std::find(cols.begin(), cols.end(), b) - cols.begin()));
  }
  return m;
}

TEST(AlcsGain, Examples) {
  const auto prev = fake({0.5, 0.5}, {"a", "b"});
  AlcsGain g = alcs_gain(prev, fake({0.7, 0.9}, {"a", "b"}));
  EXPECT_NEAR(g.delta, 0.6, 1e-12);
  EXPECT_EQ(g.p, 1.0);
  g = alcs_gain(prev, prev);
  EXPECT_EQ(g.delta, 0.0);
  EXPECT_EQ(g.p, 0.0);
  g = alcs_gain(prev, fake({0.9, 0.1}, {"a", "b"}));
  EXPECT_NEAR(g.delta, 0.0, 1e-12);
  EXPECT_EQ(g.p, 0.5);
  EXPECT_THROW(alcs_gain(prev, fake({1.0}, {"a"})), Error);
}

TEST(DuplicateScore, Examples) {
  EXPECT_EQ(duplicate_score(fake({1, 1, 1}, {"a", "a", "b"})), 2u);
  EXPECT_EQ(duplicate_score(fake({1, 1, 1}, {"a", "b", "c"})), 0u);
  EXPECT_EQ(duplicate_score(fake({1, 1, 1}, {"0", "0", "0"})), 6u);
}

TEST(DuplicateScore, MatchesPairCountOracleProperty) {
  // phi = sum over targets of c(c - 1), an independent closed form.
  Rng rng(31);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + uniform_index(rng, 12);
    std::vector<std::string> best;
    for (std::size_t i = 0; i < n; ++i) best.push_back(std::string(1, 'a' + uniform_index(rng, 4)));
    std::size_t oracle = 0;
    for (char c = 'a'; c < 'e'; ++c) {
      const auto k = static_cast<std::size_t>(std::count(best.begin(), best.end(), std::string(1, c)));
      oracle += k * (k > 0 ? k - 1 : 0);
    }
    ASSERT_EQ(duplicate_score(fake(std::vector<double>(n, 1.0), best)), oracle);
  }
}

TEST(UniquenessReward, Examples) {
  RewardConfig cfg;
  EXPECT_EQ(uniqueness_reward(0, 5, cfg, 1.0), 0.0);
  EXPECT_NEAR(uniqueness_reward(2, 4, cfg, 1.0), -1.0, 1e-12);
  EXPECT_NEAR(uniqueness_reward(2, 1, cfg, 1.0), 0.5, 1e-12);
  EXPECT_EQ(uniqueness_reward(2, 4, cfg, cfg.min_uniq_fraction - 1e-9), 0.0);
  EXPECT_NEAR(uniqueness_reward(2, 4, cfg, 1.0, 0.5), -0.5, 1e-12);
}

TEST(UniquenessFraction, CountsRowsWhoseDuplicatesDidNotGrow) {
  const auto prev = fake({1, 1, 1, 1}, {"a", "b", "c", "c"});
  const auto next = fake({1, 1, 1, 1}, {"a", "a", "c", "d"});
  // f: [1,1,2,2] -> [2,2,1,1]
  EXPECT_EQ(uniqueness_fraction(prev, next), 0.5);
  const DupChange d = duplicate_change(prev, next);
  EXPECT_EQ(d.phi_prev, 2u);
  EXPECT_EQ(d.phi_new, 2u);
}

TEST(AdaptiveWeights, Examples) {
  RewardConfig cfg;
  EXPECT_TRUE(adaptive_weights({0.9}, cfg).boosted);
  EXPECT_EQ(adaptive_weights({0.9}, cfg).alcs, cfg.alcs_weight_high);
  EXPECT_EQ(adaptive_weights({0.9}, cfg).uniq, cfg.uniq_weight_low);
  EXPECT_FALSE(adaptive_weights({0.9, 0.85}, cfg).boosted);
  EXPECT_FALSE(adaptive_weights({0.5, 0.4}, cfg).boosted);
  EXPECT_FALSE(adaptive_weights({}, cfg).boosted);
  // One candidate far below the leader: N2 = 1.
  EXPECT_TRUE(adaptive_weights({0.6, 0.2}, cfg).boosted);
}

TEST(AdaptiveWeights, PermutationInvariantProperty) {
  RewardConfig cfg;
  Rng rng(44);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> s(1 + uniform_index(rng, 6));
    for (auto& x : s) x = uniform01(rng);
    const Weights w = adaptive_weights(s, cfg);
    shuffle(s, rng);
    const Weights v = adaptive_weights(s, cfg);
    ASSERT_EQ(w.alcs, v.alcs);
    ASSERT_EQ(w.uniq, v.uniq);
    ASSERT_EQ(w.boosted, v.boosted);
  }
}

TEST(CompositeReward, Examples) {
  RewardConfig cfg;
  cfg.min_alcs_fraction = 0.5;
  const Weights w = default_weights(cfg);
  RewardBreakdown r = composite_reward({1.0, 1.0}, {2, 2, 1.0}, OpClass::kUnary, w, 3, cfg);
  EXPECT_NEAR(r.total, 0.85, 1e-12);
  r = composite_reward({1.0, 0.3}, {0, 0, 1.0}, OpClass::kUnary, w, 0, cfg);
  EXPECT_EQ(r.r_alcs, 0.0);
  EXPECT_FALSE(r.alcs_gate);
  r = composite_reward({0.0, 0.0}, {0, 0, 1.0}, OpClass::kUnary, w, 0, cfg);
  EXPECT_EQ(r.total, 0.0);
  r = composite_reward({0.0, 0.0}, {0, 0, 1.0}, OpClass::kConcat, w, 1, cfg);
  EXPECT_NEAR(r.total, -cfg.concat_cost - cfg.step_penalty, 1e-12);
}

TEST(CompositeReward, TotalIsSumOfParts) {
  RewardConfig cfg;
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const AlcsGain g{uniform01(rng) * 4 - 2, uniform01(rng)};
    const DupChange d{uniform_index(rng, 5), uniform_index(rng, 5), uniform01(rng)};
    const int step = static_cast<int>(uniform_index(rng, 7));
    const Weights w{1 + uniform01(rng), uniform01(rng), false};
    const auto r = composite_reward(g, d, OpClass::kConcat, w, step, cfg);
    ASSERT_NEAR(r.total, r.r_alcs + r.r_uniq - r.op_cost - r.step_pen, 1e-12);
    ASSERT_EQ(r.alcs_gate, g.p >= cfg.min_alcs_fraction);
    ASSERT_EQ(r.uniq_gate, d.p_uniq >= cfg.min_uniq_fraction);
    if (!r.alcs_gate) ASSERT_EQ(r.r_alcs, 0.0);
    if (!r.uniq_gate) ASSERT_EQ(r.r_uniq, 0.0);
    if (r.r_uniq > 0.0) ASSERT_TRUE(r.alcs_gate);
  }
}

TEST(CompositeReward, GateBoundaries) {
  RewardConfig cfg;
  const Weights w = default_weights(cfg);
  for (double eps : {1e-9, 1e-6}) {
    EXPECT_GT(composite_reward({1.0, cfg.min_alcs_fraction}, {0, 0, 1.0}, 0.0, w, 0, cfg).r_alcs, 0.0);
    EXPECT_GT(composite_reward({1.0, cfg.min_alcs_fraction + eps}, {0, 0, 1.0}, 0.0, w, 0, cfg).r_alcs, 0.0);
    EXPECT_EQ(composite_reward({1.0, cfg.min_alcs_fraction - eps}, {0, 0, 1.0}, 0.0, w, 0, cfg).r_alcs, 0.0);
    EXPECT_LT(composite_reward({1.0, 1.0}, {2, 4, cfg.min_uniq_fraction}, 0.0, w, 0, cfg).r_uniq, 0.0);
    EXPECT_LT(composite_reward({1.0, 1.0}, {2, 4, cfg.min_uniq_fraction + eps}, 0.0, w, 0, cfg).r_uniq, 0.0);
    EXPECT_EQ(composite_reward({1.0, 1.0}, {2, 4, cfg.min_uniq_fraction - eps}, 0.0, w, 0, cfg).r_uniq, 0.0);
  }
}

TEST(CompositeReward, StepPenaltyStrictlyDecreasing) {
  RewardConfig cfg;
  const Weights w = default_weights(cfg);
  double prev = 1e9;
  for (int i = 0; i < 10; ++i) {
    const double t = composite_reward({0.7, 1.0}, {3, 1, 1.0}, OpClass::kUnary, w, i, cfg).total;
    ASSERT_LT(t, prev);
    prev = t;
  }
}

TEST(CompositeReward, IdPrefixCollapseIsNotRewarded) {
  const std::vector<std::string> src{"0123", "0234", "0345"};
  const std::vector<std::string> tgt{"0123A", "0234A", "0356A"};
  const RewardConfig cfg;
  const AlcsMatrix prev = alcs_matrix(src, tgt);
  for (int side = 0; side < 2; ++side) {
    for (int k = 1; k <= 3; ++k) {
      const Operator op{OpKind::kPrefix, "", true, k};
      const auto a = side == 0 ? apply_operator(op, src, nullptr) : src;
      const auto b = side == 1 ? apply_operator(op, tgt, nullptr) : tgt;
      const AlcsMatrix next = alcs_matrix(a, b);
      const auto r = composite_reward(alcs_gain(prev, next), duplicate_change(prev, next),
                                      OpClass::kUnary, default_weights(cfg), 1, cfg);
      EXPECT_LE(r.total, 0.0) << "side " << side << " prefix " << k;
    }
  }
  // Collapsing both sides to "0" gives phi = 6.
  const AlcsMatrix collapsed = alcs_matrix({"0", "0", "0"}, {"0", "0", "0"}, {1});
  EXPECT_EQ(duplicate_score(collapsed), 6u);
}

}  // namespace
}  // namespace qjoin
