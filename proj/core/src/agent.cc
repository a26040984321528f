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

#include "qjoin/agent.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "qjoin/error.h"
#include "qjoin/kmeans.h"

namespace qjoin {

PolicyTable PolicyTable::uniform(const std::vector<std::string>& slots,
                                 const std::vector<Operator>& library) {
  PolicyTable t;
  if (library.empty()) return t;
  const double p = 1.0 / static_cast<double>(library.size());
  for (const auto& s : slots) {
    auto& row = t.probs[s];
    for (const auto& op : library) row[op.id()] = p;
  }
  return t;
}

double PolicyTable::prob(const std::string& slot, const std::string& op_id) const {
  auto it = probs.find(slot);
  if (it == probs.end()) return 0.0;
  auto jt = it->second.find(op_id);
  return jt == it->second.end() ? 0.0 : jt->second;
}

const std::map<std::string, double>& PolicyTable::row(const std::string& slot) const {
  static const std::map<std::string, double> empty;
  auto it = probs.find(slot);
  return it == probs.end() ? empty : it->second;
}

double policy_step(double pr, double alpha, double reward) {
  return reward > 0.0 ? pr + alpha * (1.0 - pr) : pr - alpha * pr;
}

void PolicyTable::update(const std::string& slot, const std::string& op_id,
                         double reward, double alpha) {
  auto& r = probs[slot];
  auto it = r.find(op_id);
  if (it == r.end()) return;
  it->second = policy_step(it->second, alpha, reward);
  double sum = 0.0;
  for (const auto& [k, v] : r) sum += v;
  if (sum <= 0.0) {
    for (auto& [k, v] : r) v = 1.0 / static_cast<double>(r.size());
    return;
  }
  for (auto& [k, v] : r) v /= sum;
}

double QTable::get(const std::string& state, const std::string& action) const {
  auto it = q.find(state);
  if (it == q.end()) return 0.0;
  auto jt = it->second.find(action);
  return jt == it->second.end() ? 0.0 : jt->second;
}

void QTable::set(const std::string& state, const std::string& action, double v) {
  q[state][action] = v;
}

double QTable::max_over(const std::string& state,
                        const std::vector<std::string>& actions) const {
  if (actions.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : actions) best = std::max(best, get(state, a));
  return best;
}

std::size_t QTable::size() const {
  std::size_t n = 0;
  for (const auto& [s, row] : q) n += row.size();
  return n;
}

double q_update(double q, double alpha, double reward, double gamma,
                double max_next) {
  return (1.0 - alpha) * q + alpha * (reward + gamma * max_next);
}

std::string StateKey::text() const {
  std::ostringstream os;
  os << "A[" << chain_a << "]B[" << chain_b << "]s" << alcs_bucket << "u"
     << uniq_bucket << "d" << depth;
  return os.str();
}

Agent init_agent(const std::vector<Operator>& library, const AgentConfig& cfg,
                 const QTable* warm_start, std::uint64_t seed) {
  Agent agent;
  agent.library = &library;
  agent.cfg = cfg;
  agent.policy = PolicyTable::uniform({side_name(0), side_name(1)}, library);
  if (warm_start) agent.q = *warm_start;
  agent.epsilon = cfg.epsilon;
  agent.rng.seed(seed);
  return agent;
}

void update(Agent& agent, const StateKey& state, const std::string& slot,
            const std::string& op_id, const std::string& action_id,
            double reward, const StateKey& next,
            const std::vector<std::string>& next_actions) {
  const std::string s = state.text();
  const double q = agent.q.get(s, action_id);
  const double max_next = agent.q.max_over(next.text(), next_actions);
  agent.q.set(s, action_id,
              q_update(q, agent.cfg.learning_rate, reward, agent.cfg.discount,
                       max_next));
  agent.policy.update(slot, op_id, reward, agent.cfg.learning_rate);
}

std::vector<std::size_t> stratified_sample(const std::vector<double>& maxima,
                                           std::uint64_t seed,
                                           const AgentConfig& cfg) {
  std::vector<std::size_t> all(maxima.size());
  std::iota(all.begin(), all.end(), 0);
  if (maxima.size() < 3) return all;

  const KMeans1D km = kmeans_1d(maxima, 3);
  std::vector<double> share;
  if (km.k() == 3) {
    share = {cfg.strata[0], cfg.strata[1], cfg.strata[2]};
  } else if (km.k() == 2) {
    share = {cfg.strata[0], cfg.strata[2]};
  } else {
    share = {(cfg.strata[0] + cfg.strata[1] + cfg.strata[2]) / 3.0};
  }
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < km.k(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
      if (km.labels[i] == c) members.push_back(i);
    }
    if (members.empty()) continue;
    const double p = std::clamp(share[c], 0.0, 1.0);
    std::size_t take = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(members.size()) - 1e-9));
    take = std::clamp<std::size_t>(take, 1, members.size());
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * (c + 1));
    shuffle(members, rng);
    out.insert(out.end(), members.begin(), members.begin() + take);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

Table subset_rows(const Table& t, const std::vector<std::size_t>& rows) {
  Table out;
  out.id = t.id;
  for (const auto& c : t.columns) {
    Column col;
    col.table_id = c.table_id;
    col.name = c.name;
    col.is_numeric = c.is_numeric;
    col.values.reserve(rows.size());
    for (std::size_t r : rows) col.values.push_back(c.values[r]);
    out.columns.push_back(std::move(col));
  }
  return out;
}

std::string cache_key(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  std::string key;
  for (const auto& v : a) key.append(v).push_back('\x1f');
  key.push_back('\x1e');
  for (const auto& v : b) key.append(v).push_back('\x1f');
  return key;
}

}  // namespace

Workspace::Workspace(const Table& source, const std::string& source_column,
                     const Table& target, const std::string& target_column,
                     const TrainConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), src_col_(source_column), tgt_col_(target_column) {
  const Column& sc = source.column(source_column);
  const Column& tc = target.column(target_column);
  const ValueSample ss = sample_column(sc, cfg.agent.sample_proportion, seed);
  const ValueSample ts = sample_column(tc, cfg.agent.sample_proportion, seed);
  if (ss.values.empty() || ts.values.empty()) {
    throw UnusablePairError("unusable pair " + sc.ref().key() + " / " +
                            tc.ref().key() + ": no non-empty values");
  }
  std::vector<std::size_t> rows_a = ss.indices;
  std::vector<std::size_t> rows_b = ts.indices;
  const AlcsMatrix m = alcs_matrix(ss.values, ts.values, cfg.alcs);

  std::vector<std::size_t> selected(rows_a.size());
  std::iota(selected.begin(), selected.end(), 0);
  if (rows_a.size() > kSampleFloor) {
    selected = stratified_sample(m.row_max, seed, cfg.agent);
    std::vector<std::size_t> picked;
    for (std::size_t i : selected) picked.push_back(rows_a[i]);
    rows_a = std::move(picked);
  }
  if (rows_b.size() > kSampleFloor) {
    std::set<std::size_t> keep;
    for (std::size_t i : selected) {
      for (std::size_t j : top_targets(m, i, cfg.agent.top_k)) keep.insert(j);
    }
    std::vector<std::size_t> picked;
    for (std::size_t j : keep) picked.push_back(rows_b[j]);
    rows_b = std::move(picked);
  }

  src_ = subset_rows(source, rows_a);
  tgt_ = subset_rows(target, rows_b);
  raw_.a.base = source_column;
  raw_.b.base = target_column;
  raw_.a.max_len = raw_.b.max_len = cfg.agent.max_depth;
  raw_.values_a = src_.column(source_column).values;
  raw_.values_b = tgt_.column(target_column).values;
  raw_.matrix = matrix(raw_.values_a, raw_.values_b);
}

std::vector<SlotState> Workspace::slots() const {
  return {{0, &src_, src_col_}, {1, &tgt_, tgt_col_}};
}

std::shared_ptr<const AlcsMatrix> Workspace::matrix(
    const std::vector<std::string>& a, const std::vector<std::string>& b) const {
  std::string key = cache_key(a, b);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto m = std::make_shared<const AlcsMatrix>(alcs_matrix(a, b, cfg_.alcs));
  cache_.emplace(std::move(key), m);
  return m;
}

Configuration Workspace::apply(const Configuration& from, int side,
                               const ChainStep& step) const {
  Configuration next = from;
  const Table& table = side == 0 ? src_ : tgt_;
  auto& values = side == 0 ? next.values_a : next.values_b;
  auto& chain = side == 0 ? next.a : next.b;
  if (step.op.op_class() == OpClass::kConcat) {
    values = apply_operator(step.op, values, &table.column(step.partner).values);
  } else {
    values = apply_operator(step.op, values, nullptr);
  }
  chain.steps.push_back(step);
  next.matrix = matrix(next.values_a, next.values_b);
  return next;
}

Configuration Workspace::configure(const OperatorChain& a,
                                   const OperatorChain& b) const {
  Configuration c = raw_;
  for (const auto& s : a.steps) c = apply(c, 0, s);
  for (const auto& s : b.steps) c = apply(c, 1, s);
  return c;
}

RewardBreakdown Workspace::step_reward(const Configuration& prev,
                                       const Configuration& next,
                                       OpClass op_class, const Weights& weights,
                                       int step_index) const {
  return composite_reward(alcs_gain(*prev.matrix, *next.matrix),
                          duplicate_change(*prev.matrix, *next.matrix), op_class,
                          weights, step_index, cfg_.reward);
}

RewardBreakdown Workspace::value(const Configuration& c) const {
  double cost = 0.0;
  for (const auto* chain : {&c.a, &c.b}) {
    for (const auto& s : chain->steps) cost += cfg_.reward.op_cost(s.op.op_class());
  }
  return composite_reward(alcs_gain(*raw_.matrix, *c.matrix),
                          duplicate_change(*raw_.matrix, *c.matrix), cost,
                          default_weights(cfg_.reward),
                          static_cast<int>(c.depth()), cfg_.reward);
}

std::vector<double> Workspace::concat_sims(const Configuration& from, int side,
                                           const std::vector<Action>& actions) const {
  std::vector<double> sims;
  const auto& lib = *cfg_.library;
  for (const auto& a : actions) {
    if (a.side != side || lib[a.op_index].op_class() != OpClass::kConcat) continue;
    sims.push_back(apply(from, side, {lib[a.op_index], a.partner})
                       .matrix->mean_row_max());
  }
  return sims;
}

StateKey state_of(const Configuration& c) {
  StateKey k;
  k.chain_a = c.a.steps_text();
  k.chain_b = c.b.steps_text();
  const double mean = c.matrix->mean_row_max();
  k.alcs_bucket = std::clamp(static_cast<int>(std::floor(mean * 10.0)), 0, 10);
  const double m = static_cast<double>(std::max<std::size_t>(1, c.matrix->row_count()));
  const double uniq = 1.0 - static_cast<double>(duplicate_score(*c.matrix)) / m;
  k.uniq_bucket = std::clamp(static_cast<int>(std::floor(uniq * 10.0)), 0, 10);
  k.depth = c.depth();
  return k;
}

namespace {

std::string describe(const RewardBreakdown& r) {
  std::ostringstream os;
  os << "total=" << r.total << " d_alcs=" << r.delta_alcs << " p_alcs=" << r.p_alcs
     << " phi=" << r.phi_prev << "->" << r.phi_new << " p_uniq=" << r.p_uniq
     << " r_alcs=" << r.r_alcs << " r_uniq=" << r.r_uniq << " cost=" << r.op_cost
     << " pen=" << r.step_pen;
  return os.str();
}

}  // namespace

TrainResult train(const Workspace& ws, const TrainConfig& cfg,
                  const QTable* warm_start, std::uint64_t seed,
                  const TraceFn& trace) {
  const auto& lib = *cfg.library;
  const AgentConfig& ac = cfg.agent;
  Agent agent = init_agent(lib, ac, warm_start, seed);
  TrainResult res;

  Configuration best = ws.raw();
  double best_v = 0.0;
  auto finish = [&]() {
    res.chain_a = best.a;
    res.chain_b = best.b;
    res.best_reward = best_v;
    res.final_alcs_mean = best.matrix->mean_row_max();
    res.q = agent.q;
    res.policy = agent.policy;
    return res;
  };
  if (ws.raw().matrix->mean_row_max() >= ac.tau_sim || ac.max_iterations <= 0) {
    return finish();
  }

  const auto slots = ws.slots();
  int stall = 0;
  for (int ep = 0; ep < ac.max_iterations; ++ep) {
    agent.dicts.clear();
    Configuration cur = ws.raw();
    double ep_best_v = 0.0;
    Configuration ep_best = cur;
    std::size_t attempts = 0;

    while (cur.depth() < ac.max_depth && attempts < 2 * ac.max_depth) {
      ++attempts;
      const auto actions = enumerate_actions(slots, agent.dicts, lib);
      if (actions.empty()) break;
      std::vector<std::string> ids;
      ids.reserve(actions.size());
      for (const auto& a : actions) ids.push_back(a.id(lib));
      const StateKey s = state_of(cur);
      const std::string skey = s.text();

      StepRecord rec;
      rec.episode = ep;
      const bool explore = uniform01(agent.rng) < agent.epsilon;
      std::size_t chosen = 0;
      Configuration next;
      RewardBreakdown rb;

      if (explore) {
        rec.explored = true;
        std::vector<int> sides;
        for (int side : {0, 1}) {
          if (std::any_of(actions.begin(), actions.end(),
                          [&](const Action& a) { return a.side == side; })) {
            sides.push_back(side);
          }
        }
        const int side = sides[uniform_index(agent.rng, sides.size())];
        std::vector<std::size_t> ops;
        for (const auto& a : actions) {
          if (a.side == side &&
              (ops.empty() || ops.back() != a.op_index)) {
            ops.push_back(a.op_index);
          }
        }
        double total = 0.0;
        for (std::size_t o : ops) total += agent.policy.prob(side_name(side), lib[o].id());
        double u = uniform01(agent.rng) * total;
        std::size_t op = ops.back();
        for (std::size_t o : ops) {
          u -= agent.policy.prob(side_name(side), lib[o].id());
          if (u < 0.0) {
            op = o;
            break;
          }
        }
        std::vector<std::size_t> cands;
        for (std::size_t i = 0; i < actions.size(); ++i) {
          if (actions[i].side == side && actions[i].op_index == op) cands.push_back(i);
        }
        chosen = cands[uniform_index(agent.rng, cands.size())];
        const Action& act = actions[chosen];
        const Operator& o = lib[act.op_index];
        next = ws.apply(cur, act.side, {o, act.partner});
        const Weights w = o.op_class() == OpClass::kConcat
                              ? adaptive_weights(ws.concat_sims(cur, side, actions), cfg.reward)
                              : default_weights(cfg.reward);
        rb = ws.step_reward(cur, next, o.op_class(), w, static_cast<int>(next.depth()));
        if (o.op_class() == OpClass::kConcat) {
          agent.dicts.record(o, slots[act.side].key(),
                             slots[act.side].table->id + "." + act.partner, rb.total);
        }
      } else {
        std::vector<Configuration> nexts;
        nexts.reserve(actions.size());
        for (const auto& a : actions) nexts.push_back(ws.apply(cur, a.side, {lib[a.op_index], a.partner}));
        std::array<Weights, 2> concat_w;
        for (int side : {0, 1}) {
          std::vector<double> sims;
          for (std::size_t i = 0; i < actions.size(); ++i) {
            if (actions[i].side == side && lib[actions[i].op_index].op_class() == OpClass::kConcat) {
              sims.push_back(nexts[i].matrix->mean_row_max());
            }
          }
          concat_w[side] = adaptive_weights(sims, cfg.reward);
        }
        std::vector<RewardBreakdown> rewards(actions.size());
        for (std::size_t i = 0; i < actions.size(); ++i) {
          const Operator& o = lib[actions[i].op_index];
          const Weights w = o.op_class() == OpClass::kConcat ? concat_w[actions[i].side]
                                                             : default_weights(cfg.reward);
          rewards[i] = ws.step_reward(cur, nexts[i], o.op_class(), w,
                                      static_cast<int>(nexts[i].depth()));
          if (o.op_class() == OpClass::kConcat) {
            agent.dicts.record(o, slots[actions[i].side].key(),
                               slots[actions[i].side].table->id + "." + actions[i].partner,
                               rewards[i].total);
          }
        }
        for (std::size_t i = 1; i < actions.size(); ++i) {
          const double ri = rewards[i].total;
          const double rc = rewards[chosen].total;
          if (ri > rc || (ri == rc && agent.q.get(skey, ids[i]) > agent.q.get(skey, ids[chosen]))) {
            chosen = i;
          }
        }
        rec.best_evaluated = rewards[chosen].total;
        if (rewards[chosen].total <= 0.0) {
          rec.action = "RESET";
          rec.reward = rewards[chosen].total;
          res.steps.push_back(rec);
          if (trace) trace("episode=" + std::to_string(ep) + " RESET");
          break;
        }
        next = std::move(nexts[chosen]);
        rb = rewards[chosen];
      }

      const Action& act = actions[chosen];
      const bool accepted = rb.total > 0.0;
      rec.action = ids[chosen];
      rec.reward = rb.total;
      rec.accepted = accepted;
      res.steps.push_back(rec);
      if (trace) {
        trace("episode=" + std::to_string(ep) + " action=" + ids[chosen] +
              (rec.explored ? " explore" : " exploit") +
              (accepted ? " accepted " : " rejected ") + describe(rb));
      }
      const StateKey ns = accepted ? state_of(next) : s;
      update(agent, s, side_name(act.side), lib[act.op_index].id(), ids[chosen],
             rb.total, ns, ids);
      if (accepted) {
        cur = std::move(next);
        const double v = ws.value(cur).total;
        if (v > ep_best_v) {
          ep_best_v = v;
          ep_best = cur;
        }
      }
    }

    agent.epsilon *= ac.epsilon_decay;
    res.iterations = ep + 1;
    res.reward_trace.push_back(ep_best_v);
    double improvement = 0.0;
    if (ep_best_v > best_v) {
      improvement = ep_best_v - best_v;
      best_v = ep_best_v;
      best = ep_best;
    }
    stall = improvement < ac.eps_tol ? stall + 1 : 0;
    if (trace) {
      trace("episode=" + std::to_string(ep) + " value=" + std::to_string(ep_best_v) +
            " best=" + std::to_string(best_v));
    }
    if (best.matrix->mean_row_max() >= ac.tau_sim) break;
    if (stall >= ac.patience) break;
  }
  return finish();
}

TrainResult train(const std::pair<ColumnRef, ColumnRef>& pair,
                  const Repository& repo, const TrainConfig& cfg,
                  const QTable* warm_start, std::uint64_t seed,
                  const TraceFn& trace) {
  const Table& a = repo.table(pair.first.table);
  const Table& b = repo.table(pair.second.table);
  const Workspace ws(a, pair.first.column, b, pair.second.column, cfg, seed);
  return train(ws, cfg, warm_start, seed, trace);
}

}  // namespace qjoin
