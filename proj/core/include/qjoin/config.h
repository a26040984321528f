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
#include <string>

#include "qjoin/agent.h"
#include "qjoin/joiner.h"
#include "qjoin/pipeline.h"
#include "qjoin/reuse.h"
#include "qjoin/reward.h"
#include "qjoin/similarity.h"

namespace qjoin {

struct EngineConfig {
  std::uint64_t seed = 7;
  AlcsConfig alcs;
  RewardConfig reward;
  AgentConfig agent;
  PipelineConfig pipeline;  // its alcs and seed fields are overwritten
  JoinerConfig joiner;      // its alcs field is overwritten
  ReuseConfig reuse;

  TrainConfig train_config() const;
  PipelineConfig pipeline_config() const;
  JoinerConfig joiner_config() const;

  bool operator==(const EngineConfig& o) const { return to_json() == o.to_json(); }
  std::string to_json() const;
};

// Parses a JSON document. Missing keys keep their defaults; unknown keys,
// wrong types and out-of-range values throw ConfigError naming the key.
EngineConfig config_from_json(const std::string& text);
EngineConfig load_config(const std::filesystem::path& path);

}  // namespace qjoin
