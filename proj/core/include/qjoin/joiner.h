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

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qjoin/similarity.h"

namespace qjoin {

enum class Regime { kShort, kMedium, kLong };
std::string regime_name(Regime r);

struct JoinerConfig {
  double short_below = 8.0;   // l_min < short_below: short
  double medium_below = 20.0; // l_min < medium_below: medium, else long
  double d_short = 0.05;
  double d_medium = 0.10;
  double d_long = 0.15;
  // Carried per regime for completeness; the match rule does not use it.
  double alpha_short = 1.0;
  double alpha_medium = 1.0;
  double alpha_long = 1.0;
  AlcsConfig alcs;
};

struct JoinThreshold {
  double thr_join = 0.0;
  double tolerance = 0.0;
  double alpha_sim = 1.0;
  Regime regime = Regime::kShort;
  double l_min = 0.0;
  double alcs_mean = 0.0;
  double alcs_median = 0.0;

  double bar() const { return thr_join - tolerance; }
};

// Regime from l_min; thr = max(mean row max, mean of the middle k-means
// cluster of the row maxima).
JoinThreshold threshold_from_maxima(const std::vector<double>& row_maxima,
                                    double l_min, const JoinerConfig& cfg);

// Scores the non-empty values of A against those of B. Throws
// UnusablePairError when a side has no values.
JoinThreshold adaptive_threshold(const std::vector<std::string>& vals_a,
                                 const std::vector<std::string>& vals_b,
                                 const JoinerConfig& cfg);

struct Match {
  std::size_t source_row = 0;
  std::size_t target_row = 0;
  double score = 0.0;
};

struct JoinResult {
  std::vector<Match> matches;
  std::size_t distinct_sources = 0;
  std::size_t distinct_targets = 0;
};

// Every (i, j) with ALCS >= thr - d; empty values never match.
JoinResult fuzzy_join(const std::vector<std::string>& vals_a,
                      const std::vector<std::string>& vals_b,
                      const JoinThreshold& thr, const AlcsConfig& alcs = {});

struct JoinMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

using RowPair = std::pair<std::size_t, std::size_t>;

JoinMetrics score_against_truth(const JoinResult& result,
                                const std::set<RowPair>& truth);

// `source_row,target_row` with a header line.
std::set<RowPair> read_truth_csv(std::istream& in);
void write_joined_csv(std::ostream& out, const JoinResult& result);

}  // namespace qjoin
