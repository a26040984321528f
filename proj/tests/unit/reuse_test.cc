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

#include "qjoin/error.h"
#include "qjoin/reuse.h"
#include "test_util.h"

namespace qjoin {
namespace {

using testing::TempDir;
using testing::fixture;

constexpr const char* kNamesChain =
    "base(\"CANDLAST\")|concat_back(\", \",\"CANDFIRST\")|concat_back(\" \",\"CANDMI\")";

ReuseEntry entry(const std::string& src_table, double reward, int cluster = 0) {
  ReuseEntry e;
  e.chain_a = parse_chain(kNamesChain);
  e.chain_b.base = "CANDNAME";
  e.cluster_id = cluster;
  e.reward = reward;
  e.features = {1.0, 2.0};
  e.source = {src_table, "CANDLAST"};
  e.target = {"funds_payments", "CANDNAME"};
  return e;
}

struct Names {
  Repository repo = load_repository(fixture("names/repo"));
  Workspace ws{repo.table("campaign_expenditures"), "CANDLAST",
               repo.table("funds_payments"), "CANDNAME", TrainConfig{}, 7};
  std::pair<ColumnRef, ColumnRef> pair{{"campaign_expenditures", "CANDLAST"},
                                       {"funds_payments", "CANDNAME"}};
};

TEST(Library, StorePolicy) {
  ReuseLibrary lib;
  EXPECT_EQ(lib.store(entry("t", 2.0)), StoreResult::kAdded);
  EXPECT_EQ(lib.size(), 1u);
  EXPECT_EQ(lib.store(entry("t", 1.0)), StoreResult::kIgnored);
  EXPECT_EQ(lib.entries()[0].reward, 2.0);
  EXPECT_EQ(lib.store(entry("t", 3.0)), StoreResult::kReplaced);
  EXPECT_EQ(lib.size(), 1u);
  EXPECT_EQ(lib.entries()[0].reward, 3.0);
  EXPECT_EQ(lib.store(entry("u", 1.0, 4)), StoreResult::kAdded);
  EXPECT_EQ(lib.for_cluster(4).size(), 1u);
  EXPECT_EQ(lib.for_cluster(9).size(), 0u);
  EXPECT_EQ(lib.closest({1.0, 2.0}), &lib.entries()[0]);
  EXPECT_EQ(ReuseLibrary{}.closest({1.0}), nullptr);
}

TEST(Library, RoundTripReproducesChainOutputs) {
  Names f;
  ReuseLibrary lib;
  ReuseEntry e = entry("campaign_expenditures", 4.0);
  e.q.set("s", "a", 0.25);
  e.policy.probs["A:CANDLAST"]["lowercase"] = 0.5;
  e.reward_trace = {1.0, 4.0};
  lib.store(e);
  TempDir dir("reuse_rt");
  lib.save(dir.path() / "lib.jsonl");
  const ReuseLibrary back = ReuseLibrary::load(dir.path() / "lib.jsonl");
  ASSERT_EQ(back.size(), 1u);
  const ReuseEntry& r = back.entries()[0];
  EXPECT_EQ(r.chain_a, e.chain_a);
  EXPECT_EQ(r.q.get("s", "a"), 0.25);
  EXPECT_EQ(r.policy.probs.at("A:CANDLAST").at("lowercase"), 0.5);
  EXPECT_EQ(r.reward_trace, e.reward_trace);
  EXPECT_EQ(r.provenance_key(), e.provenance_key());
  const Table& t = f.repo.table("campaign_expenditures");
  EXPECT_EQ(compose_chain(r.chain_a, t), compose_chain(e.chain_a, t));
  std::ostringstream a, b;
  lib.write(a);
  back.write(b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_TRUE(ReuseLibrary::load(dir.path() / "missing.jsonl").empty());
  std::istringstream bad("not a library\n");
  EXPECT_THROW(ReuseLibrary::read(bad), Error);
}

TEST(SelectBestPair, LeftFoldExamples) {
  RewardConfig cfg;
  EXPECT_EQ(select_best_pair({{"a", 0.5, 0.1}}, cfg), 0u);
  EXPECT_EQ(select_best_pair({{"a", 0.5, 0.2}, {"b", 0.7, 0.1}}, cfg), 1u);
  EXPECT_EQ(select_best_pair({{"a", 0.5, 0.1}, {"b", 0.5, 0.1}}, cfg), 0u);
  EXPECT_THROW(select_best_pair({}, cfg), Error);
}

TEST(SelectBestPair, OrderSensitiveNotGlobalArgmax) {
  RewardConfig cfg;
  cfg.alcs_weight = 1.0;
  cfg.uniq_weight = 1.0;
  const PairSummary a{"a", 0.5, 0.1};
  const PairSummary b{"b", 0.705, 0.121};
  const PairSummary c{"c", 0.602, 0.11};
  EXPECT_LE(pair_switch_reward(a, b, cfg), 0.0);
  EXPECT_GT(pair_switch_reward(a, c, cfg), 0.0);
  EXPECT_GT(pair_switch_reward(c, b, cfg), 0.0);
  // c wins the fold yet b beats c head to head.
  EXPECT_EQ(select_best_pair({a, b, c}, cfg), 2u);
  EXPECT_EQ(select_best_pair({a, c, b}, cfg), 2u);
}

TEST(Replacements, CoClusteredColumnIsFound) {
  const ColumnRef name{"a", "name"}, mi{"b", "middle_initial"}, last_b{"b", "last"};
  const ColumnRef last_c{"c", "last"}, mi_c{"c", "mi"};
  const ClusterMap clusters{{0, {{name, mi}, {name, mi_c}, {last_c, name}}}};
  const auto r = find_equivalent_replacements(clusters, {last_c, name}, {last_b, name}, mi);
  EXPECT_EQ(r, (std::vector<ColumnRef>{mi_c}));
  EXPECT_TRUE(find_equivalent_replacements({}, {last_c, name}, {last_b, name}, mi).empty());
  const ClusterMap unrelated{{0, {{name, mi_c}}}};
  EXPECT_TRUE(find_equivalent_replacements(unrelated, {last_c, name}, {last_b, name}, mi).empty());
}

TEST(ApplyReuse, EmptyLibraryMisses) {
  Names f;
  for (ReuseMode m : {ReuseMode::kOff, ReuseMode::kOneShot, ReuseMode::kSequential}) {
    const auto o = apply_reuse(f.ws, f.pair, 0, {}, m, {});
    EXPECT_FALSE(o.hit);
    EXPECT_TRUE(o.fell_back_to_training);
    EXPECT_FALSE(o.accepted_chain.has_value());
  }
  EXPECT_EQ(parse_reuse_mode("one-shot"), ReuseMode::kOneShot);
  EXPECT_EQ(reuse_mode_name(ReuseMode::kSequential), "sequential");
  EXPECT_THROW(parse_reuse_mode("twice"), Error);
}

TEST(ApplyReuse, IdenticalTaskIsAOneShotHit) {
  Names f;
  ReuseLibrary lib;
  lib.store(entry("campaign_expenditures", 4.0));
  const auto o = apply_reuse(f.ws, f.pair, 0, lib, ReuseMode::kOneShot, {});
  ASSERT_TRUE(o.hit);
  EXPECT_GT(o.reward_delta, 0.0);
  EXPECT_EQ(o.accepted_chain->first.text(), kNamesChain);
  EXPECT_EQ(o.steps_accepted, 2u);
  EXPECT_NEAR(o.reward_delta, f.ws.value(f.ws.configure(o.accepted_chain->first,
                                                        o.accepted_chain->second)).total,
              1e-12);
  // Other clusters are not consulted.
  EXPECT_FALSE(apply_reuse(f.ws, f.pair, 3, lib, ReuseMode::kOneShot, {}).hit);
}

TEST(ApplyReuse, UnresolvableColumnMisses) {
  Names f;
  ReuseLibrary lib;
  ReuseEntry e = entry("other", 4.0);
  e.chain_a = parse_chain("base(\"x\")|concat_back(\" \",\"NOPE\")");
  lib.store(e);
  const auto o = apply_reuse(f.ws, f.pair, 0, lib, ReuseMode::kOneShot, {});
  EXPECT_FALSE(o.hit);
  EXPECT_TRUE(o.fell_back_to_training);
}

TEST(ApplyReuse, NeverAcceptsNonPositiveReward) {
  Names f;
  ReuseLibrary lib;
  ReuseEntry e = entry("campaign_expenditures", 4.0);
  e.chain_a = parse_chain("base(\"CANDLAST\")|prefix(1)");
  lib.store(e);
  for (ReuseMode m : {ReuseMode::kOneShot, ReuseMode::kSequential}) {
    const auto o = apply_reuse(f.ws, f.pair, 0, lib, m, {});
    EXPECT_FALSE(o.hit);
    EXPECT_EQ(o.reward_delta, 0.0);
  }
}

TEST(Sequential, HarmfulThirdStepStopsReplay) {
  Names f;
  const OperatorChain a = parse_chain(std::string(kNamesChain) + "|lowercase");
  OperatorChain b;
  b.base = "CANDNAME";
  const SequentialReplay rep = replay_sequential(f.ws, a, b);
  EXPECT_EQ(rep.accepted, 2u);
  EXPECT_EQ(rep.config.a.text(), kNamesChain);
  EXPECT_GT(rep.reward, 0.0);

  ReuseLibrary lib;
  ReuseEntry e = entry("campaign_expenditures", 4.0);
  e.chain_a = a;
  lib.store(e);
  const auto o = apply_reuse(f.ws, f.pair, 0, lib, ReuseMode::kSequential, {});
  ASSERT_TRUE(o.hit);
  EXPECT_EQ(o.steps_accepted, 2u);
  EXPECT_EQ(o.accepted_chain->first.text(), kNamesChain);
}

}  // namespace
}  // namespace qjoin
