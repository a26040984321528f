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

#include "qjoin/config.h"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "qjoin/error.h"

namespace qjoin {

using nlohmann::json;

namespace {

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + " must be an object");
  }

  void number(const char* key, double& out, double lo, double hi) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
      throw ConfigError(where(key) + ": value " + v.dump() + " out of range");
    }
    out = x;
  }

  template <typename T>
  void integer(const char* key, T& out, long long lo, long long hi) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      throw ConfigError(where(key) + ": value " + v.dump() + " out of range");
    }
    out = static_cast<T>(x);
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(where(key) + ": expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void boolean(const char* key, bool& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    out = v.get<bool>();
  }

  void int_list(const char* key, std::vector<int>& out, int lo, int hi) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected a list");
    std::vector<int> xs;
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<long long>() < lo || e.get<long long>() > hi) {
        throw ConfigError(where(key) + ": expected integers in [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
      }
      xs.push_back(e.get<int>());
    }
    out = std::move(xs);
  }

  void triple(const char* key, std::array<double, 3>& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3) {
      throw ConfigError(where(key) + ": expected a list of three numbers");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (!v[i].is_number() || v[i].get<double>() < 0.0 || v[i].get<double>() > 1.0) {
        throw ConfigError(where(key) + ": expected numbers in [0, 1]");
      }
      out[i] = v[i].get<double>();
    }
  }

  std::optional<Section> child(const char* key) {
    if (!take(key)) return std::nullopt;
    return Section(j_.at(key), where(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown configuration key: " + where(k));
    }
  }

 private:
  bool take(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  std::string where(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "<root>" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TrainConfig EngineConfig::train_config() const {
  TrainConfig t;
  t.agent = agent;
  t.reward = reward;
  t.alcs = alcs;
  return t;
}

PipelineConfig EngineConfig::pipeline_config() const {
  PipelineConfig p = pipeline;
  p.alcs = alcs;
  p.seed = seed;
  p.discovery.seed = seed;
  return p;
}

JoinerConfig EngineConfig::joiner_config() const {
  JoinerConfig j = joiner;
  j.alcs = alcs;
  return j;
}

std::string EngineConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["alcs"] = {{"min_significant_len", alcs.min_significant_len}};
  j["reward"] = {{"alcs_weight", reward.alcs_weight},
                 {"uniq_weight", reward.uniq_weight},
                 {"alcs_weight_high", reward.alcs_weight_high},
                 {"uniq_weight_low", reward.uniq_weight_low},
                 {"min_alcs_fraction", reward.min_alcs_fraction},
                 {"min_uniq_fraction", reward.min_uniq_fraction},
                 {"tau_high", reward.tau_high},
                 {"tau_diff", reward.tau_diff},
                 {"step_penalty", reward.step_penalty},
                 {"unary_cost", reward.unary_cost},
                 {"concat_cost", reward.concat_cost}};
  j["agent"] = {{"learning_rate", agent.learning_rate},
                {"discount", agent.discount},
                {"epsilon", agent.epsilon},
                {"epsilon_decay", agent.epsilon_decay},
                {"max_depth", agent.max_depth},
                {"tau_sim", agent.tau_sim},
                {"eps_tol", agent.eps_tol},
                {"patience", agent.patience},
                {"max_iterations", agent.max_iterations},
                {"strata", agent.strata},
                {"top_k", agent.top_k},
                {"sample_proportion", agent.sample_proportion}};
  const auto& d = pipeline.discovery;
  j["pipeline"] = {{"discovery",
                    {{"theta", d.theta},
                     {"perms", d.perms},
                     {"gram_sizes", d.gram_sizes},
                     {"containment", d.containment},
                     {"include_numeric", d.include_numeric}}},
                   {"delta", pipeline.delta},
                   {"top_k", pipeline.top_k},
                   {"cluster_cut", pipeline.cluster_cut},
                   {"sample_proportion", pipeline.sample_proportion},
                   {"prescore_q", pipeline.prescore_q},
                   {"order_percentile", pipeline.order_percentile}};
  j["joiner"] = {{"short_below", joiner.short_below},
                 {"medium_below", joiner.medium_below},
                 {"d_short", joiner.d_short},
                 {"d_medium", joiner.d_medium},
                 {"d_long", joiner.d_long},
                 {"alpha_short", joiner.alpha_short},
                 {"alpha_medium", joiner.alpha_medium},
                 {"alpha_long", joiner.alpha_long}};
  j["reuse"] = {{"max_replacements", reuse.max_replacements},
                {"validate_reverse", reuse.validate_reverse}};
  return j.dump(2);
}

EngineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  EngineConfig c;
  Section root(j, "");
  root.unsigned64("seed", c.seed);
  if (auto s = root.child("alcs")) {
    s->integer("min_significant_len", c.alcs.min_significant_len, 1, 1 << 20);
    s->finish();
  }
  if (auto s = root.child("reward")) {
    auto& r = c.reward;
    s->number("alcs_weight", r.alcs_weight, 0.0, kInf);
    s->number("uniq_weight", r.uniq_weight, 0.0, kInf);
    s->number("alcs_weight_high", r.alcs_weight_high, 0.0, kInf);
    s->number("uniq_weight_low", r.uniq_weight_low, 0.0, kInf);
    s->number("min_alcs_fraction", r.min_alcs_fraction, 0.0, 1.0);
    s->number("min_uniq_fraction", r.min_uniq_fraction, 0.0, 1.0);
    s->number("tau_high", r.tau_high, 0.0, 1.0);
    s->number("tau_diff", r.tau_diff, 0.0, 1.0);
    s->number("step_penalty", r.step_penalty, 0.0, kInf);
    s->number("unary_cost", r.unary_cost, 0.0, kInf);
    s->number("concat_cost", r.concat_cost, 0.0, kInf);
    s->finish();
    if (r.alcs_weight_high < r.alcs_weight) {
      throw ConfigError("reward.alcs_weight_high must be >= reward.alcs_weight");
    }
    if (r.uniq_weight_low > r.uniq_weight) {
      throw ConfigError("reward.uniq_weight_low must be <= reward.uniq_weight");
    }
  }
  if (auto s = root.child("agent")) {
    auto& a = c.agent;
    s->number("learning_rate", a.learning_rate, 1e-12, 1.0);
    s->number("discount", a.discount, 0.0, 1.0);
    s->number("epsilon", a.epsilon, 0.0, 1.0);
    s->number("epsilon_decay", a.epsilon_decay, 0.0, 1.0);
    s->integer("max_depth", a.max_depth, 0, 64);
    s->number("tau_sim", a.tau_sim, 0.0, 1.0);
    s->number("eps_tol", a.eps_tol, 0.0, kInf);
    s->integer("patience", a.patience, 1, 1 << 20);
    s->integer("max_iterations", a.max_iterations, 0, 1 << 24);
    s->triple("strata", a.strata);
    s->integer("top_k", a.top_k, 1, 1 << 20);
    s->number("sample_proportion", a.sample_proportion, 1e-12, 1.0);
    s->finish();
  }
  if (auto s = root.child("pipeline")) {
    auto& p = c.pipeline;
    if (auto d = s->child("discovery")) {
      d->number("theta", p.discovery.theta, 1e-12, 1.0);
      d->integer("perms", p.discovery.perms, 16, 4096);
      d->int_list("gram_sizes", p.discovery.gram_sizes, 1, 16);
      d->boolean("containment", p.discovery.containment);
      d->boolean("include_numeric", p.discovery.include_numeric);
      d->finish();
    }
    s->number("delta", p.delta, 0.0, 1.0);
    s->integer("top_k", p.top_k, 1, 1LL << 40);
    s->number("cluster_cut", p.cluster_cut, 0.0, kInf);
    s->number("sample_proportion", p.sample_proportion, 1e-12, 1.0);
    s->integer("prescore_q", p.prescore_q, 1, 16);
    s->number("order_percentile", p.order_percentile, 0.0, 1.0);
    s->finish();
  }
  if (auto s = root.child("joiner")) {
    auto& jn = c.joiner;
    s->number("short_below", jn.short_below, 0.0, kInf);
    s->number("medium_below", jn.medium_below, 0.0, kInf);
    s->number("d_short", jn.d_short, 0.0, 1.0);
    s->number("d_medium", jn.d_medium, 0.0, 1.0);
    s->number("d_long", jn.d_long, 0.0, 1.0);
    s->number("alpha_short", jn.alpha_short, 0.0, kInf);
    s->number("alpha_medium", jn.alpha_medium, 0.0, kInf);
    s->number("alpha_long", jn.alpha_long, 0.0, kInf);
    s->finish();
    if (jn.medium_below < jn.short_below) {
      throw ConfigError("joiner.medium_below must be >= joiner.short_below");
    }
  }
  if (auto s = root.child("reuse")) {
    s->integer("max_replacements", c.reuse.max_replacements, 1, 1 << 20);
    s->boolean("validate_reverse", c.reuse.validate_reverse);
    s->finish();
  }
  root.finish();
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace qjoin
