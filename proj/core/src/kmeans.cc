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

#include "qjoin/kmeans.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qjoin {

KMeans1D kmeans_1d(const std::vector<double>& values, std::size_t k,
                   int iterations) {
  KMeans1D out;
  if (values.empty() || k == 0) return out;
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  k = std::min(k, distinct.size());

  std::vector<double> c(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t pos =
        k == 1 ? distinct.size() / 2
               : static_cast<std::size_t>(std::lround(
                     static_cast<double>(i) * (distinct.size() - 1) / (k - 1)));
    c[i] = distinct[pos];
  }

  std::vector<std::size_t> labels(values.size(), 0);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t v = 0; v < values.size(); ++v) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (std::abs(values[v] - c[j]) < std::abs(values[v] - c[best])) best = j;
      }
      labels[v] = best;
    }
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t v = 0; v < values.size(); ++v) {
      sum[labels[v]] += values[v];
      ++count[labels[v]];
    }
    bool moved = false;
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] == 0) continue;  // empty cluster keeps its centroid
      const double nc = sum[j] / static_cast<double>(count[j]);
      if (nc != c[j]) moved = true;
      c[j] = nc;
    }
    if (!moved && it > 0) break;
  }
  for (std::size_t v = 0; v < values.size(); ++v) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (std::abs(values[v] - c[j]) < std::abs(values[v] - c[best])) best = j;
    }
    labels[v] = best;
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return c[x] < c[y]; });
  std::vector<std::size_t> rank(k);
  for (std::size_t r = 0; r < k; ++r) rank[order[r]] = r;
  out.centroids.resize(k);
  for (std::size_t j = 0; j < k; ++j) out.centroids[rank[j]] = c[j];
  out.labels.resize(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) out.labels[v] = rank[labels[v]];
  return out;
}

}  // namespace qjoin
