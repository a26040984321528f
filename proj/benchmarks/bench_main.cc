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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "qjoin/minhash.h"
#include "qjoin/random.h"
#include "qjoin/similarity.h"

namespace {

std::string random_string(qjoin::Rng& rng, std::size_t len) {
  std::string s(len, 'a');
  for (auto& c : s) c = static_cast<char>('a' + qjoin::uniform_index(rng, 6));
  return s;
}

std::vector<std::string> random_column(std::size_t n, std::uint64_t seed) {
  qjoin::Rng rng(seed);
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(random_string(rng, 8 + i % 24));
  return v;
}

void BM_LcsSubstring(benchmark::State& state) {
  qjoin::Rng rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const std::string a = random_string(rng, len);
  const std::string b = random_string(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(qjoin::lcs_substring(a, b));
}
BENCHMARK(BM_LcsSubstring)->Arg(16)->Arg(64)->Arg(256);

void BM_AlcsMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_column(n, 2);
  const auto b = random_column(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(qjoin::alcs_matrix(a, b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}
BENCHMARK(BM_AlcsMatrix)->Arg(20)->Arg(100)->Arg(300);

void BM_MinHash(benchmark::State& state) {
  const auto col = random_column(static_cast<std::size_t>(state.range(0)), 4);
  const auto elems = qjoin::signature_elements(col, {1, 2, 3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(qjoin::minhash_signature(elems, 128, 1, {"t", "c"}));
  }
}
BENCHMARK(BM_MinHash)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
