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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qjoin/corpus.h"

namespace qjoin {

struct AlcsConfig {
  // Common substrings shorter than this count as no match.
  int min_significant_len = 3;
};

// Length of the longest contiguous common substring, in Unicode scalars.
std::size_t lcs_substring(std::string_view s1, std::string_view s2);
std::size_t lcs_substring(std::u32string_view s1, std::u32string_view s2);

// LCS / mean length, or 0 when the LCS is shorter than the significance
// length. Two empty strings score 0.
double alcs(std::string_view s1, std::string_view s2, const AlcsConfig& cfg = {});
double alcs(std::u32string_view s1, std::u32string_view s2,
            const AlcsConfig& cfg = {});

// Distinct contiguous q-scalar substrings of `s`.
std::set<std::string> qgrams(std::string_view s, int q);

// |A ∩ B| / |A ∪ B| over q-gram sets; 0 when both sets are empty.
double jaccard_qgram(std::string_view s1, std::string_view s2, int q);

struct AlcsMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<double> scores;        // row-major, rows.size() x cols.size()
  std::vector<std::size_t> lcs;      // raw LCS lengths, same layout
  std::vector<double> row_max;
  std::vector<std::size_t> row_argmax;

  std::size_t row_count() const { return rows.size(); }
  std::size_t col_count() const { return cols.size(); }
  double at(std::size_t i, std::size_t j) const {
    return scores[i * cols.size() + j];
  }
  double mean_row_max() const;
  // Best-match target value for row i.
  const std::string& best_match(std::size_t i) const {
    return cols[row_argmax[i]];
  }
};

// Full ALCS matrix. Ties on the row maximum go to the longer raw LCS, then
// to the lower target index. Throws UnusablePairError on an empty side.
AlcsMatrix alcs_matrix(const std::vector<std::string>& src,
                       const std::vector<std::string>& tgt,
                       const AlcsConfig& cfg = {});
AlcsMatrix alcs_matrix(const ValueSample& src, const ValueSample& tgt,
                       const AlcsConfig& cfg = {});

// Indices of the k best targets for row i (by score, then LCS, then index).
std::vector<std::size_t> top_targets(const AlcsMatrix& m, std::size_t row,
                                     std::size_t k);

}  // namespace qjoin
