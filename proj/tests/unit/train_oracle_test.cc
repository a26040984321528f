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

#include "../acceptance/oracles.h"
#include "qjoin/agent.h"
#include "test_util.h"

namespace qjoin {
namespace {

using testing::fixture;

void expect_matches_exhaustive(const std::string& repo_dir, const std::string& ta,
                               const std::string& ca, const std::string& tb,
                               const std::string& cb) {
  const Repository repo = load_repository(fixture(repo_dir));
  const TrainConfig cfg;
  const Workspace ws(repo.table(ta), ca, repo.table(tb), cb, cfg, 7);
  const TrainResult r = train(ws, cfg, nullptr, 7);
  const auto search = oracle::exhaustive_chains(ws.source_rows(), ca, ws.target_rows(), cb,
                                                cfg.reward, 3);
  std::string best;
  for (const auto& s : search.best_steps) best += s.text() + " ";
  EXPECT_NEAR(r.best_reward, search.best, 1e-9)
      << "engine " << r.chain_a.text() << " / " << r.chain_b.text() << ", exhaustive " << best;
}

TEST(TrainOracle, NamesBestEqualsExhaustiveDepth3) {
  expect_matches_exhaustive("names/repo", "campaign_expenditures", "CANDLAST", "funds_payments",
                            "CANDNAME");
}

TEST(TrainOracle, IdFixtureBestEqualsExhaustiveDepth3) {
  expect_matches_exhaustive("id/repo", "ids_a", "id", "ids_b", "id");
}

}  // namespace
}  // namespace qjoin
