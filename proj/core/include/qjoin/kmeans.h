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
#include <vector>

namespace qjoin {

struct KMeans1D {
  // Cluster ids are ordered by centroid: 0 is the lowest cluster.
  std::vector<std::size_t> labels;
  std::vector<double> centroids;

  std::size_t k() const { return centroids.size(); }
};

// Lloyd's algorithm on scalars. k is capped by the number of distinct
// values; centroids start at evenly spaced distinct values (min, middle,
// max for k = 3). Ties go to the lower cluster.
KMeans1D kmeans_1d(const std::vector<double>& values, std::size_t k,
                   int iterations = 20);

}  // namespace qjoin
