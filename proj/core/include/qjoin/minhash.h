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
#include <set>
#include <string>
#include <vector>

#include "qjoin/corpus.h"

namespace qjoin {

struct MinHashSignature {
  ColumnRef column;
  int perms = 0;
  std::vector<std::uint64_t> hashes;
  std::size_t set_size = 0;

  std::string key() const { return column.key(); }
};

// Element set hashed for a column. With gram sizes, the union of the q-grams
// of every value for each q; with no gram sizes, the distinct whole values.
std::set<std::string> signature_elements(const std::vector<std::string>& values,
                                         const std::vector<int>& gram_sizes);

// Throws Error when `elements` is empty or perms < 16.
MinHashSignature minhash_signature(const std::set<std::string>& elements,
                                   int perms, std::uint64_t seed = 1,
                                   ColumnRef column = {});

MinHashSignature column_signature(const Column& col, int perms,
                                  const std::vector<int>& gram_sizes,
                                  std::uint64_t seed = 1);

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// Estimated |A ∩ B| / |A| from the Jaccard estimate and the set sizes.
double estimate_containment(const MinHashSignature& a,
                            const MinHashSignature& b);

struct LshPair {
  ColumnRef a;  // a.key() < b.key()
  ColumnRef b;
  double j_hat = 0.0;
};

struct BandConfig {
  int bands = 0;
  int rows = 0;
};

// Band/row split (bands * rows <= perms) minimising the equally weighted
// false-positive and false-negative areas around `threshold`.
BandConfig optimal_bands(double threshold, int perms);

// Banded LSH over the signatures. Jaccard mode scores pairs by estimated
// Jaccard; containment mode partitions by set size, probes with a per-query
// band split and scores by the larger directional containment. Only
// cross-table pairs scoring >= threshold are returned, sorted by key.
std::vector<LshPair> lsh_index_and_query(
    const std::vector<MinHashSignature>& signatures, double threshold,
    bool containment);

}  // namespace qjoin
