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

#include "qjoin/joiner.h"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include "qjoin/csv.h"
#include "qjoin/error.h"
#include "qjoin/kmeans.h"
#include "qjoin/utf8.h"

namespace qjoin {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::kShort: return "short";
    case Regime::kMedium: return "medium";
    case Regime::kLong: return "long";
  }
  return "short";
}

JoinThreshold threshold_from_maxima(const std::vector<double>& maxima,
                                    double l_min, const JoinerConfig& cfg) {
  JoinThreshold t;
  t.l_min = l_min;
  if (l_min < cfg.short_below) {
    t.regime = Regime::kShort;
    t.tolerance = cfg.d_short;
    t.alpha_sim = cfg.alpha_short;
  } else if (l_min < cfg.medium_below) {
    t.regime = Regime::kMedium;
    t.tolerance = cfg.d_medium;
    t.alpha_sim = cfg.alpha_medium;
  } else {
    t.regime = Regime::kLong;
    t.tolerance = cfg.d_long;
    t.alpha_sim = cfg.alpha_long;
  }
  if (maxima.empty()) return t;
  t.alcs_mean = std::accumulate(maxima.begin(), maxima.end(), 0.0) /
                static_cast<double>(maxima.size());
  const KMeans1D km = kmeans_1d(maxima, 3);
  const std::size_t middle = km.k() / 2;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    if (km.labels[i] == middle) {
      sum += maxima[i];
      ++n;
    }
  }
  t.alcs_median = n ? sum / static_cast<double>(n) : km.centroids[middle];
  t.thr_join = std::max(t.alcs_mean, t.alcs_median);
  return t;
}

JoinThreshold adaptive_threshold(const std::vector<std::string>& vals_a,
                                 const std::vector<std::string>& vals_b,
                                 const JoinerConfig& cfg) {
  std::vector<std::string> a;
  std::vector<std::string> b;
  double len_a = 0.0;
  double len_b = 0.0;
  for (const auto& v : vals_a) {
    if (v.empty()) continue;
    a.push_back(v);
    len_a += static_cast<double>(utf8_length(v));
  }
  for (const auto& v : vals_b) {
    if (v.empty()) continue;
    b.push_back(v);
    len_b += static_cast<double>(utf8_length(v));
  }
  if (a.empty() || b.empty()) {
    throw UnusablePairError("join threshold needs non-empty values on both sides");
  }
  const double l_min = std::min(len_a / static_cast<double>(a.size()),
                                len_b / static_cast<double>(b.size()));
  return threshold_from_maxima(alcs_matrix(a, b, cfg.alcs).row_max, l_min, cfg);
}

JoinResult fuzzy_join(const std::vector<std::string>& vals_a,
                      const std::vector<std::string>& vals_b,
                      const JoinThreshold& thr, const AlcsConfig& alcs) {
  JoinResult r;
  std::vector<std::size_t> ia;
  std::vector<std::size_t> ib;
  std::vector<std::string> a;
  std::vector<std::string> b;
  for (std::size_t i = 0; i < vals_a.size(); ++i) {
    if (!vals_a[i].empty()) {
      ia.push_back(i);
      a.push_back(vals_a[i]);
    }
  }
  for (std::size_t j = 0; j < vals_b.size(); ++j) {
    if (!vals_b[j].empty()) {
      ib.push_back(j);
      b.push_back(vals_b[j]);
    }
  }
  if (a.empty() || b.empty()) return r;
  const AlcsMatrix m = alcs_matrix(a, b, alcs);
  const double bar = thr.bar();
  std::set<std::size_t> src;
  std::set<std::size_t> tgt;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double s = m.at(i, j);
      if (s >= bar) {
        r.matches.push_back({ia[i], ib[j], s});
        src.insert(ia[i]);
        tgt.insert(ib[j]);
      }
    }
  }
  r.distinct_sources = src.size();
  r.distinct_targets = tgt.size();
  return r;
}

JoinMetrics score_against_truth(const JoinResult& result,
                                const std::set<RowPair>& truth) {
  JoinMetrics m;
  std::set<RowPair> found;
  for (const auto& x : result.matches) found.insert({x.source_row, x.target_row});
  if (found.empty() || truth.empty()) return m;
  std::size_t tp = 0;
  for (const auto& p : found) tp += truth.count(p);
  m.precision = static_cast<double>(tp) / static_cast<double>(found.size());
  m.recall = static_cast<double>(tp) / static_cast<double>(truth.size());
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

std::set<RowPair> read_truth_csv(std::istream& in) {
  CsvReader reader(in);
  CsvRow row;
  if (!reader.next(row)) throw Error("ground truth file is empty");
  std::set<RowPair> truth;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() < 2) {
      throw Error("ground truth line " + std::to_string(reader.line()) +
                  " needs source_row,target_row");
    }
    try {
      truth.insert({static_cast<std::size_t>(std::stoull(row[0])),
                    static_cast<std::size_t>(std::stoull(row[1]))});
    } catch (const std::exception&) {
      throw Error("ground truth line " + std::to_string(reader.line()) +
                  " is not numeric");
    }
  }
  return truth;
}

void write_joined_csv(std::ostream& out, const JoinResult& result) {
  write_csv_row(out, {"source_row", "target_row", "score"});
  for (const auto& m : result.matches) {
    write_csv_row(out, {std::to_string(m.source_row), std::to_string(m.target_row),
                        format_number(m.score)});
  }
}

}  // namespace qjoin
