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

#include "qjoin/pipeline.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "qjoin/csv.h"
#include "qjoin/error.h"
#include "qjoin/kmeans.h"
#include "qjoin/minhash.h"
#include "qjoin/random.h"

namespace qjoin {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool usable(const Column& c, bool include_numeric) {
  if (c.is_numeric && !include_numeric) return false;
  return std::any_of(c.values.begin(), c.values.end(),
                     [](const std::string& v) { return !v.empty(); });
}

std::vector<std::string> non_empty(const std::vector<std::string>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

double mean_row_max(const std::vector<std::string>& a,
                    const std::vector<std::string>& b, const AlcsConfig& cfg) {
  if (a.empty() || b.empty()) return 0.0;
  return alcs_matrix(a, b, cfg).mean_row_max();
}

struct UnionFind {
  std::map<std::string, std::string> parent;
  std::string find(const std::string& x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    if (it->second == x) return x;
    std::string root = find(it->second);
    parent[x] = root;
    return root;
  }
  bool unite(const std::string& a, const std::string& b) {
    const std::string ra = find(a);
    const std::string rb = find(b);
    if (ra == rb) return false;
    parent[std::max(ra, rb)] = std::min(ra, rb);
    return true;
  }
};

}  // namespace

bool is_date_name(std::string_view name) {
  const std::string n = lower(name);
  for (const char* tok : {"date", "time", "year", "month"}) {
    if (n.find(tok) != std::string::npos) return true;
  }
  return false;
}

bool same_name(std::string_view a, std::string_view b) {
  return lower(a) == lower(b);
}

std::vector<Candidate> discover_candidates(const Repository& repo,
                                           const DiscoveryConfig& cfg) {
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) {
    throw ConfigError("discovery.theta must be in (0, 1]");
  }
  std::vector<MinHashSignature> sigs;
  std::map<std::string, std::size_t> index;
  for (const auto& [id, table] : repo.tables) {
    for (const auto& col : table.columns) {
      if (!usable(col, cfg.include_numeric)) continue;
      const auto elems = signature_elements(col.values, cfg.gram_sizes);
      if (elems.empty()) continue;
      index[col.ref().key()] = sigs.size();
      sigs.push_back(minhash_signature(elems, cfg.perms, cfg.seed, col.ref()));
    }
  }

  std::map<std::string, Candidate> found;
  for (const auto& p : lsh_index_and_query(sigs, cfg.theta, cfg.containment)) {
    Candidate c{p.a, p.b, p.j_hat, false};
    found.emplace(c.key(), c);
  }

  // Forced pairs: equal or date-like names across tables.
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    for (std::size_t j = i + 1; j < sigs.size(); ++j) {
      const ColumnRef& x = sigs[i].column;
      const ColumnRef& y = sigs[j].column;
      if (x.table == y.table) continue;
      const bool forced = same_name(x.column, y.column) ||
                          (is_date_name(x.column) && is_date_name(y.column));
      if (!forced) continue;
      Candidate c;
      c.a = x;
      c.b = y;
      if (c.b.key() < c.a.key()) std::swap(c.a, c.b);
      auto it = found.find(c.key());
      if (it != found.end()) {
        it->second.forced = true;
        continue;
      }
      c.j_hat = cfg.containment
                    ? std::max(estimate_containment(sigs[i], sigs[j]),
                               estimate_containment(sigs[j], sigs[i]))
                    : estimate_jaccard(sigs[i], sigs[j]);
      c.forced = true;
      found.emplace(c.key(), c);
    }
  }

  std::vector<Candidate> out;
  for (auto& [k, c] : found) out.push_back(c);
  return out;
}

std::vector<Candidate> prune_trivial(const std::vector<Candidate>& candidates,
                                     const Repository& repo, double theta,
                                     const DiscoveryConfig& cfg) {
  std::map<std::string, MinHashSignature> sigs;
  auto sign = [&](const ColumnRef& ref) {
    if (sigs.count(ref.key())) return;
    const auto elems = signature_elements(repo.column(ref).values, {});
    if (elems.empty()) return;
    sigs.emplace(ref.key(), minhash_signature(elems, cfg.perms, cfg.seed, ref));
  };
  for (const auto& c : candidates) {
    sign(c.a);
    sign(c.b);
  }
  std::vector<MinHashSignature> list;
  for (const auto& [k, s] : sigs) list.push_back(s);
  std::set<std::string> trivial;
  for (const auto& p : lsh_index_and_query(list, theta, false)) {
    trivial.insert(p.a.key() + "|" + p.b.key());
  }
  std::vector<Candidate> out;
  for (const auto& c : candidates) {
    if (!trivial.count(c.key())) out.push_back(c);
  }
  return out;
}

double prescore_jaccard(const std::pair<ColumnRef, ColumnRef>& pair,
                        const Repository& repo, double proportion, int q,
                        std::uint64_t seed) {
  const auto src = sample_column(repo.column(pair.first), proportion, seed);
  const auto tgt = sample_column(repo.column(pair.second), proportion, seed);
  if (src.values.empty() || tgt.values.empty()) return 0.0;
  std::vector<std::set<std::string>> tg;
  for (const auto& v : tgt.values) tg.push_back(qgrams(v, q));
  double sum = 0.0;
  for (const auto& s : src.values) {
    const auto sg = qgrams(s, q);
    double best = 0.0;
    for (const auto& t : tg) {
      if (sg.empty() && t.empty()) continue;
      std::size_t inter = 0;
      for (const auto& g : sg) inter += t.count(g);
      best = std::max(best, static_cast<double>(inter) /
                                static_cast<double>(sg.size() + t.size() - inter));
    }
    sum += best;
  }
  return sum / static_cast<double>(src.values.size());
}

AlcsPrescore prescore_alcs(const std::pair<ColumnRef, ColumnRef>& pair,
                           const Repository& repo, double proportion,
                           const std::vector<Operator>& direct_ops,
                           std::uint64_t seed, const AlcsConfig& alcs) {
  for (const auto& op : direct_ops) {
    if (op.op_class() != OpClass::kUnary) {
      throw Error("pre-scoring accepts unary operators only");
    }
  }
  AlcsPrescore out;
  const auto src = sample_column(repo.column(pair.first), proportion, seed).values;
  const auto tgt = sample_column(repo.column(pair.second), proportion, seed).values;
  if (src.empty() || tgt.empty()) return out;

  out.s_a = mean_row_max(src, tgt, alcs);
  double best = out.s_a;
  std::vector<std::string> best_src = src;
  for (const auto& op : direct_ops) {
    auto cand = non_empty(apply_operator(op, src, nullptr));
    const double s = mean_row_max(cand, tgt, alcs);
    if (s > best) {
      best = s;
      best_src = std::move(cand);
      out.op_a = op.id();
    }
  }
  for (const auto& op : direct_ops) {
    const auto cand = non_empty(apply_operator(op, tgt, nullptr));
    const double s = mean_row_max(best_src, cand, alcs);
    if (s > best) {
      best = s;
      out.op_b = op.id();
    }
  }
  out.s_a_prime = best;
  out.delta = out.s_a_prime - out.s_a;
  return out;
}

PairDescriptor describe_pair(const Candidate& c, const Repository& repo,
                             const PipelineConfig& cfg) {
  PairDescriptor d;
  d.a = c.a;
  d.b = c.b;
  d.j_hat = c.j_hat;
  const std::pair<ColumnRef, ColumnRef> pair{c.a, c.b};
  d.s_j = prescore_jaccard(pair, repo, cfg.sample_proportion, cfg.prescore_q, cfg.seed);
  std::vector<Operator> unary;
  for (const auto& op : default_library()) {
    if (op.op_class() == OpClass::kUnary) unary.push_back(op);
  }
  const AlcsPrescore ap =
      prescore_alcs(pair, repo, cfg.sample_proportion, unary, cfg.seed, cfg.alcs);
  d.s_a = ap.s_a;
  d.s_a_prime = ap.s_a_prime;
  d.delta_a = ap.delta;
  const ColumnStats sa = column_stats(repo.column(c.a));
  const ColumnStats sb = column_stats(repo.column(c.b));
  const double hi = std::max(sa.avg_len, sb.avg_len);
  const double ratio = hi > 0.0 ? std::min(sa.avg_len, sb.avg_len) / hi : 0.0;
  d.features = {d.s_j, d.s_a, d.delta_a, ratio, sa.token_entropy,
                sb.token_entropy, sa.distinct_ratio, sb.distinct_ratio};
  return d;
}

std::vector<PairDescriptor> filter_candidates(
    const std::vector<PairDescriptor>& descriptors, double delta,
    std::size_t k) {
  std::map<std::pair<std::string, std::string>, std::vector<const PairDescriptor*>> groups;
  for (const auto& d : descriptors) {
    if (d.score() >= delta) groups[{d.a.table, d.b.table}].push_back(&d);
  }
  std::vector<PairDescriptor> out;
  for (auto& [tables, list] : groups) {
    std::stable_sort(list.begin(), list.end(),
                     [](const PairDescriptor* x, const PairDescriptor* y) {
                       if (x->score() != y->score()) return x->score() > y->score();
                       return x->key() < y->key();
                     });
    for (std::size_t i = 0; i < list.size() && i < k; ++i) out.push_back(*list[i]);
  }
  std::sort(out.begin(), out.end(), [](const PairDescriptor& x, const PairDescriptor& y) {
    return x.key() < y.key();
  });
  return out;
}

std::vector<int> average_linkage(const std::vector<std::vector<double>>& pts,
                                 double cut) {
  const std::size_t n = pts.size();
  std::vector<int> labels(n, 0);
  if (n == 0) return labels;
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t f = 0; f < pts[i].size(); ++f) {
        const double x = pts[i][f] - pts[j][f];
        s += x * x;
      }
      d[i][j] = d[j][i] = std::sqrt(s);
    }
  }
  // Active clusters are identified by their lowest member index.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && d[i][j] < best) {
          best = d[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    if (!(best <= cut)) break;
    const double wi = static_cast<double>(members[bi].size());
    const double wj = static_cast<double>(members[bj].size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      d[bi][k] = d[k][bi] = (wi * d[bi][k] + wj * d[bj][k]) / (wi + wj);
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
    active[bj] = false;
  }
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (std::size_t m : members[i]) labels[m] = next;
    ++next;
  }
  return labels;
}

std::vector<double> ClusterModel::normalise(const FeatureVector& f) const {
  std::vector<double> out(kFeatureCount);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    out[i] = stddev[i] > 0.0 ? (f[i] - mean[i]) / stddev[i] : 0.0;
  }
  return out;
}

int ClusterModel::nearest(const FeatureVector& f) const {
  if (centroids.empty()) return -1;
  const auto x = normalise(f);
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const auto y = normalise(centroids[c]);
    double s = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    if (s < best_d) {
      best_d = s;
      best = static_cast<int>(c);
    }
  }
  return best;
}

ClusterModel cluster_pairs(const std::vector<PairDescriptor>& descriptors,
                           double cut) {
  ClusterModel m;
  m.linkage_threshold = cut;
  const std::size_t n = descriptors.size();
  if (n == 0) return m;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double s = 0.0;
    for (const auto& d : descriptors) s += d.features[f];
    m.mean[f] = s / static_cast<double>(n);
    double v = 0.0;
    for (const auto& d : descriptors) v += (d.features[f] - m.mean[f]) * (d.features[f] - m.mean[f]);
    m.stddev[f] = std::sqrt(v / static_cast<double>(n));
    if (m.stddev[f] < 1e-12) m.stddev[f] = 0.0;
  }
  std::vector<std::vector<double>> pts;
  for (const auto& d : descriptors) pts.push_back(m.normalise(d.features));
  m.labels = average_linkage(pts, cut);
  const int k = *std::max_element(m.labels.begin(), m.labels.end()) + 1;
  m.centroids.assign(k, FeatureVector{});
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      m.centroids[m.labels[i]][f] += descriptors[i].features[f];
    }
    ++count[m.labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    for (auto& v : m.centroids[c]) v /= static_cast<double>(count[c]);
  }
  return m;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

std::vector<std::size_t> order_tasks(const std::vector<std::size_t>& members,
                                     const std::vector<PairDescriptor>& descs,
                                     const std::set<std::string>& transformed,
                                     double percentile) {
  std::map<std::string, double> max_sim;
  std::vector<double> alcs_scores;
  for (std::size_t i : members) {
    const auto& d = descs[i];
    for (const auto& col : {d.a.key(), d.b.key()}) {
      max_sim[col] = std::max(max_sim[col], d.score());
    }
    alcs_scores.push_back(d.s_a);
  }
  const double bar = quantile(alcs_scores, percentile);
  // TotalSim for a table pair: sum of MaxSim over the source-table columns
  // that occur in the cluster's pairs between those tables.
  std::map<std::pair<std::string, std::string>, std::set<std::string>> cols;
  for (std::size_t i : members) {
    cols[{descs[i].a.table, descs[i].b.table}].insert(descs[i].a.key());
  }
  auto total_sim = [&](const PairDescriptor& d) {
    double s = 0.0;
    for (const auto& c : cols[{d.a.table, d.b.table}]) s += max_sim[c];
    return s;
  };
  struct Row {
    std::size_t idx;
    bool seen;
    bool strong;
    double total;
  };
  std::vector<Row> rows;
  for (std::size_t i : members) {
    const auto& d = descs[i];
    rows.push_back({i, transformed.count(d.a.key()) || transformed.count(d.b.key()),
                    d.s_a > bar, total_sim(d)});
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& x, const Row& y) {
    if (x.seen != y.seen) return x.seen;
    if (x.strong != y.strong) return x.strong;
    if (x.total != y.total) return x.total > y.total;
    if (descs[x.idx].s_a != descs[y.idx].s_a) return descs[x.idx].s_a > descs[y.idx].s_a;
    return descs[x.idx].key() < descs[y.idx].key();
  });
  std::vector<std::size_t> out;
  for (const auto& r : rows) out.push_back(r.idx);
  return out;
}

std::string folder_name(Folder f) {
  switch (f) {
    case Folder::kSame: return "same_names";
    case Folder::kDate: return "date_names";
    case Folder::kElse: return "else_names";
  }
  return "else_names";
}

Folder parse_folder(std::string_view s) {
  if (s == "same_names") return Folder::kSame;
  if (s == "date_names") return Folder::kDate;
  if (s == "else_names") return Folder::kElse;
  throw Error("unknown folder: " + std::string(s));
}

Folder folder_for(std::string_view a, std::string_view b) {
  if (same_name(a, b)) return Folder::kSame;
  if (is_date_name(a) && is_date_name(b)) return Folder::kDate;
  return Folder::kElse;
}

std::vector<JoinTask> mst_tasks(const std::vector<Candidate>& candidates) {
  std::map<std::pair<std::string, std::string>, const Candidate*> best;
  for (const auto& c : candidates) {
    if (c.a.table == c.b.table) continue;
    auto key = std::make_pair(std::min(c.a.table, c.b.table), std::max(c.a.table, c.b.table));
    auto it = best.find(key);
    if (it == best.end() || c.j_hat > it->second->j_hat ||
        (c.j_hat == it->second->j_hat && c.key() < it->second->key())) {
      best[key] = &c;
    }
  }
  std::vector<const Candidate*> edges;
  for (const auto& [k, c] : best) edges.push_back(c);
  std::sort(edges.begin(), edges.end(), [](const Candidate* x, const Candidate* y) {
    if (x->j_hat != y->j_hat) return x->j_hat > y->j_hat;
    return x->key() < y->key();
  });
  UnionFind uf;
  std::vector<JoinTask> out;
  for (const Candidate* c : edges) {
    if (!uf.unite(c->a.table, c->b.table)) continue;
    JoinTask t;
    ColumnRef a = c->a;
    ColumnRef b = c->b;
    if (b.table < a.table) std::swap(a, b);
    t.t_a = a.table;
    t.c_a = a.column;
    t.t_b = b.table;
    t.c_b = b.column;
    t.j_hat = c->j_hat;
    t.folder = folder_for(t.c_a, t.c_b);
    out.push_back(std::move(t));
  }
  return out;
}

void build_folders(std::vector<JoinTask>& tasks) {
  std::vector<double> else_scores;
  std::vector<std::size_t> else_idx;
  std::map<std::string, int> freq;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& t = tasks[i];
    t.folder = folder_for(t.c_a, t.c_b);
    t.group = 0;
    ++freq[t.t_a];
    ++freq[t.t_b];
    if (t.folder == Folder::kElse) {
      else_scores.push_back(t.j_hat);
      else_idx.push_back(i);
    }
  }
  if (!else_scores.empty()) {
    const KMeans1D km = kmeans_1d(else_scores, 3);
    // Group 0 holds the most similar tasks.
    for (std::size_t k = 0; k < else_idx.size(); ++k) {
      tasks[else_idx[k]].group = static_cast<int>(km.k() - 1 - km.labels[k]);
    }
  }
  std::stable_sort(tasks.begin(), tasks.end(), [&](const JoinTask& x, const JoinTask& y) {
    if (x.folder != y.folder) return x.folder < y.folder;
    if (x.group != y.group) return x.group < y.group;
    const int fx = freq[x.t_a] + freq[x.t_b];
    const int fy = freq[y.t_a] + freq[y.t_b];
    if (fx != fy) return fx > fy;
    return x.key() < y.key();
  });
}

std::size_t cluster_sample_size(std::size_t n) {
  return std::min(n, std::min<std::size_t>(std::max<std::size_t>(n, 10), 20));
}

std::vector<std::size_t> downsample_cluster(const std::vector<std::size_t>& members,
                                            std::uint64_t seed) {
  std::vector<std::size_t> out = members;
  const std::size_t size = cluster_sample_size(members.size());
  if (size < out.size()) {
    Rng rng(seed);
    shuffle(out, rng);
    out.resize(size);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> best_pair_in_cluster(
    const std::vector<std::size_t>& members,
    const std::vector<PairDescriptor>& descs, bool pruned) {
  if (members.empty()) return std::nullopt;
  double tau = -std::numeric_limits<double>::infinity();
  if (pruned) {
    std::vector<double> js;
    for (std::size_t i : members) js.push_back(descs[i].j_hat);
    tau = quantile(js, 0.9);
  }
  std::optional<std::size_t> best;
  for (std::size_t i : members) {
    if (descs[i].j_hat < tau) continue;
    if (!best || descs[i].s_a > descs[*best].s_a ||
        (descs[i].s_a == descs[*best].s_a && descs[i].key() < descs[*best].key())) {
      best = i;
    }
  }
  return best;
}

DiscoveryResult run_discovery(const Repository& repo, const PipelineConfig& cfg) {
  DiscoveryResult r;
  r.candidates = discover_candidates(repo, cfg.discovery);
  r.retained = prune_trivial(r.candidates, repo, cfg.discovery.theta, cfg.discovery);
  for (const auto& c : r.retained) r.descriptors.push_back(describe_pair(c, repo, cfg));

  const auto filtered = filter_candidates(r.descriptors, cfg.delta, cfg.top_k);
  std::set<std::string> kept_keys;
  for (const auto& d : filtered) kept_keys.insert(d.key());
  r.kept.resize(r.descriptors.size());
  for (std::size_t i = 0; i < r.descriptors.size(); ++i) {
    r.kept[i] = kept_keys.count(r.descriptors[i].key()) > 0;
  }
  // With nothing above the bar, cluster everything so tasks still get ids.
  std::vector<PairDescriptor> basis = filtered.empty() ? r.descriptors : filtered;
  r.clusters = cluster_pairs(basis, cfg.cluster_cut);
  std::map<std::string, int> label;
  for (std::size_t i = 0; i < basis.size(); ++i) label[basis[i].key()] = r.clusters.labels[i];
  r.cluster_of.resize(r.descriptors.size());
  for (std::size_t i = 0; i < r.descriptors.size(); ++i) {
    auto it = label.find(r.descriptors[i].key());
    r.cluster_of[i] = it != label.end() ? it->second
                                        : r.clusters.nearest(r.descriptors[i].features);
  }

  r.tasks = mst_tasks(r.retained);
  std::map<std::string, int> by_key;
  for (std::size_t i = 0; i < r.descriptors.size(); ++i) {
    by_key[r.descriptors[i].key()] = r.cluster_of[i];
  }
  for (auto& t : r.tasks) {
    std::string k1 = t.a().key() + "|" + t.b().key();
    std::string k2 = t.b().key() + "|" + t.a().key();
    if (auto it = by_key.find(k1); it != by_key.end()) t.cluster = it->second;
    else if (auto jt = by_key.find(k2); jt != by_key.end()) t.cluster = jt->second;
  }
  build_folders(r.tasks);
  return r;
}

void write_tasks_csv(std::ostream& out, const std::vector<JoinTask>& tasks) {
  write_csv_row(out, {"t_a", "c_a", "t_b", "c_b", "j_hat", "folder", "group", "cluster"});
  for (const auto& t : tasks) {
    write_csv_row(out, {t.t_a, t.c_a, t.t_b, t.c_b, format_number(t.j_hat),
                        folder_name(t.folder), std::to_string(t.group),
                        std::to_string(t.cluster)});
  }
}

std::vector<JoinTask> read_tasks_csv(std::istream& in) {
  CsvReader reader(in);
  CsvRow header;
  if (!reader.next(header)) throw Error("tasks file is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* req : {"t_a", "c_a", "t_b", "c_b"}) {
    if (!col.count(req)) throw Error(std::string("tasks file lacks column ") + req);
  }
  auto get = [&](const CsvRow& row, const char* name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return "";
    return row[it->second];
  };
  std::vector<JoinTask> tasks;
  CsvRow row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    JoinTask t;
    t.t_a = get(row, "t_a");
    t.c_a = get(row, "c_a");
    t.t_b = get(row, "t_b");
    t.c_b = get(row, "c_b");
    const std::string j = get(row, "j_hat");
    const std::string f = get(row, "folder");
    const std::string g = get(row, "group");
    const std::string c = get(row, "cluster");
    try {
      t.j_hat = j.empty() ? 0.0 : std::stod(j);
      t.group = g.empty() ? 0 : std::stoi(g);
      t.cluster = c.empty() ? -1 : std::stoi(c);
    } catch (const std::exception&) {
      throw Error("malformed numeric field in tasks file at line " +
                  std::to_string(reader.line()));
    }
    t.folder = f.empty() ? folder_for(t.c_a, t.c_b) : parse_folder(f);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

void write_clusters_csv(std::ostream& out, const DiscoveryResult& r) {
  CsvRow header{"pair", "cluster", "kept", "j_hat", "s_j", "s_a", "s_a_prime", "delta_a"};
  for (std::size_t f = 0; f < kFeatureCount; ++f) header.push_back("f" + std::to_string(f));
  write_csv_row(out, header);
  std::map<int, std::vector<std::size_t>> by_cluster;
  for (std::size_t i = 0; i < r.descriptors.size(); ++i) by_cluster[r.cluster_of[i]].push_back(i);
  for (const auto& [cluster, members] : by_cluster) {
    for (std::size_t i : order_tasks(members, r.descriptors, {}, 0.5)) {
      const auto& d = r.descriptors[i];
      CsvRow row{d.key(), std::to_string(cluster), r.kept[i] ? "1" : "0",
                 format_number(d.j_hat), format_number(d.s_j), format_number(d.s_a),
                 format_number(d.s_a_prime), format_number(d.delta_a)};
      for (double v : d.features) row.push_back(format_number(v));
      write_csv_row(out, row);
    }
  }
}

}  // namespace qjoin
