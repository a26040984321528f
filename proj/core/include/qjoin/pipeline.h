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
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qjoin/corpus.h"
#include "qjoin/operators.h"
#include "qjoin/similarity.h"

namespace qjoin {

struct DiscoveryConfig {
  double theta = 0.6;
  int perms = 128;
  std::vector<int> gram_sizes = {1, 2, 3};
  bool containment = true;
  bool include_numeric = false;
  std::uint64_t seed = 1;
};

struct Candidate {
  ColumnRef a;  // a.key() < b.key()
  ColumnRef b;
  double j_hat = 0.0;
  bool forced = false;

  std::string key() const { return a.key() + "|" + b.key(); }
};

// Case-insensitive match on date, time, year or month.
bool is_date_name(std::string_view name);
bool same_name(std::string_view a, std::string_view b);

// q-gram MinHash/LSH over non-numeric columns, plus every cross-table pair
// with equal names or two date-like names. Sorted by key.
std::vector<Candidate> discover_candidates(const Repository& repo,
                                           const DiscoveryConfig& cfg);

// Drops pairs whose whole-value MinHash Jaccard reaches theta.
std::vector<Candidate> prune_trivial(const std::vector<Candidate>& candidates,
                                     const Repository& repo, double theta,
                                     const DiscoveryConfig& cfg);

// Mean over sampled source values of the best q-gram Jaccard to the sample
// of target values. 0 for an empty sample.
double prescore_jaccard(const std::pair<ColumnRef, ColumnRef>& pair,
                        const Repository& repo, double proportion, int q,
                        std::uint64_t seed);

struct AlcsPrescore {
  double s_a = 0.0;
  double s_a_prime = 0.0;
  double delta = 0.0;
  std::string op_a = "identity";
  std::string op_b = "identity";
};

// Mean-max ALCS raw and after the best single unary operator per side (the
// identity is always a candidate, so delta >= 0).
AlcsPrescore prescore_alcs(const std::pair<ColumnRef, ColumnRef>& pair,
                           const Repository& repo, double proportion,
                           const std::vector<Operator>& direct_ops,
                           std::uint64_t seed, const AlcsConfig& alcs = {});

inline constexpr std::size_t kFeatureCount = 8;
using FeatureVector = std::array<double, kFeatureCount>;

struct PairDescriptor {
  ColumnRef a;
  ColumnRef b;
  double j_hat = 0.0;
  double s_j = 0.0;
  double s_a = 0.0;
  double s_a_prime = 0.0;
  double delta_a = 0.0;
  // s_J, s_A, delta, length ratio, entropy a, entropy b, distinct a, distinct b
  FeatureVector features{};

  double score() const { return std::max(s_j, s_a); }
  std::string key() const { return a.key() + "|" + b.key(); }
};

struct PipelineConfig {
  DiscoveryConfig discovery;
  double delta = 0.6;
  std::size_t top_k = 3;
  double cluster_cut = 0.5;
  double sample_proportion = 0.5;
  int prescore_q = 2;
  double order_percentile = 0.5;
  AlcsConfig alcs;
  std::uint64_t seed = 7;
};

PairDescriptor describe_pair(const Candidate& c, const Repository& repo,
                             const PipelineConfig& cfg);

// Keeps pairs with max(s_J, s_A) >= delta, then the k best per table pair.
std::vector<PairDescriptor> filter_candidates(
    const std::vector<PairDescriptor>& descriptors, double delta,
    std::size_t k);

// Average-linkage agglomeration on Euclidean distance, merging while the
// closest clusters are within `cut`. Labels follow first appearance.
std::vector<int> average_linkage(const std::vector<std::vector<double>>& points,
                                 double cut);

struct ClusterModel {
  std::vector<int> labels;
  std::vector<FeatureVector> centroids;  // raw feature means
  FeatureVector mean{};                  // z-score parameters
  FeatureVector stddev{};
  double linkage_threshold = 0.5;

  std::vector<double> normalise(const FeatureVector& f) const;
  int nearest(const FeatureVector& f) const;
  std::size_t cluster_count() const { return centroids.size(); }
};

ClusterModel cluster_pairs(const std::vector<PairDescriptor>& descriptors,
                           double cut);

// Orders the members of one cluster: transformed-column priority, above the
// percentile ALCS, TotalSim, s_A, then key.
std::vector<std::size_t> order_tasks(
    const std::vector<std::size_t>& members,
    const std::vector<PairDescriptor>& descriptors,
    const std::set<std::string>& transformed_columns, double percentile = 0.5);

enum class Folder { kSame, kDate, kElse };
std::string folder_name(Folder f);
Folder parse_folder(std::string_view s);
Folder folder_for(std::string_view column_a, std::string_view column_b);

struct JoinTask {
  std::string t_a;
  std::string c_a;
  std::string t_b;
  std::string c_b;
  double j_hat = 0.0;
  Folder folder = Folder::kElse;
  int group = 0;
  int cluster = -1;

  ColumnRef a() const { return {t_a, c_a}; }
  ColumnRef b() const { return {t_b, c_b}; }
  std::string key() const { return t_a + "." + c_a + "|" + t_b + "." + c_b; }
};

// Best column pair per table pair, then Kruskal on descending j_hat.
std::vector<JoinTask> mst_tasks(const std::vector<Candidate>& candidates);

// Assigns folders (same names, then date names, then the rest), groups the
// rest by k-means on j_hat and sorts by folder, group and table frequency.
void build_folders(std::vector<JoinTask>& tasks);

// min(max(n, 10), 20), never more than n.
std::size_t cluster_sample_size(std::size_t n);
std::vector<std::size_t> downsample_cluster(const std::vector<std::size_t>& members,
                                            std::uint64_t seed);

double quantile(std::vector<double> values, double q);

// Highest-s_A member. With pruning, only members whose j_hat reaches the 0.9
// quantile of the cluster's j_hat are considered.
std::optional<std::size_t> best_pair_in_cluster(
    const std::vector<std::size_t>& members,
    const std::vector<PairDescriptor>& descriptors, bool pruned);

struct DiscoveryResult {
  std::vector<Candidate> candidates;
  std::vector<Candidate> retained;
  std::vector<PairDescriptor> descriptors;  // one per retained candidate
  std::vector<bool> kept;                   // survived filtering
  ClusterModel clusters;
  std::vector<int> cluster_of;              // per descriptor
  std::vector<JoinTask> tasks;
};

DiscoveryResult run_discovery(const Repository& repo, const PipelineConfig& cfg);

void write_tasks_csv(std::ostream& out, const std::vector<JoinTask>& tasks);
std::vector<JoinTask> read_tasks_csv(std::istream& in);
void write_clusters_csv(std::ostream& out, const DiscoveryResult& result);

}  // namespace qjoin
