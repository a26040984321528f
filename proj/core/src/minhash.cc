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

#include "qjoin/minhash.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <map>
#include <unordered_map>

#include "qjoin/error.h"
#include "qjoin/random.h"
#include "qjoin/similarity.h"

namespace qjoin {
namespace {

constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;

std::uint64_t mod61(Uint128 x) {
  std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
  std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
  std::uint64_t r = lo + hi;
  while (r >= kMersenne61) r -= kMersenne61;
  return r;
}

double probability_collide(double s, int b, int r) {
  return 1.0 - std::pow(1.0 - std::pow(s, r), b);
}

double integrate(double lo, double hi, int b, int r, bool false_positive) {
  constexpr int kSteps = 200;
  if (hi <= lo) return 0.0;
  const double h = (hi - lo) / kSteps;
  double area = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double x = lo + i * h;
    double y = probability_collide(x, b, r);
    if (!false_positive) y = 1.0 - y;
    area += (i == 0 || i == kSteps) ? 0.5 * y : y;
  }
  return area * h;
}

std::uint64_t band_hash(const MinHashSignature& sig, int band, int rows) {
  return stable_hash(sig.hashes.data() + static_cast<std::size_t>(band) * rows,
                     sizeof(std::uint64_t) * rows,
                     static_cast<std::uint64_t>(band) * 1315423911ULL + rows);
}

struct BandTable {
  int rows = 0;
  int bands = 0;
  // One bucket map per band.
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> buckets;
};

BandTable build_table(const std::vector<MinHashSignature>& sigs,
                      const std::vector<std::size_t>& members, int bands,
                      int rows) {
  BandTable t;
  t.rows = rows;
  t.bands = bands;
  t.buckets.resize(bands);
  for (std::size_t idx : members) {
    for (int band = 0; band < bands; ++band) {
      t.buckets[band][band_hash(sigs[idx], band, rows)].push_back(idx);
    }
  }
  return t;
}

void probe(const BandTable& t, const MinHashSignature& q, int bands,
           std::vector<std::size_t>& out) {
  for (int band = 0; band < std::min(bands, t.bands); ++band) {
    auto it = t.buckets[band].find(band_hash(q, band, t.rows));
    if (it == t.buckets[band].end()) continue;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
}

}  // namespace

std::set<std::string> signature_elements(const std::vector<std::string>& values,
                                         const std::vector<int>& gram_sizes) {
  std::set<std::string> out;
  for (const auto& v : values) {
    if (v.empty()) continue;
    if (gram_sizes.empty()) {
      out.insert(v);
      continue;
    }
    for (int q : gram_sizes) {
      auto grams = qgrams(v, q);
      out.insert(grams.begin(), grams.end());
    }
  }
  return out;
}

MinHashSignature minhash_signature(const std::set<std::string>& elements,
                                   int perms, std::uint64_t seed,
                                   ColumnRef column) {
  if (perms < 16) throw Error("MinHash needs at least 16 permutations");
  if (elements.empty()) {
    throw Error("cannot sign an empty set for " + column.key());
  }
  MinHashSignature sig;
  sig.column = std::move(column);
  sig.perms = perms;
  sig.set_size = elements.size();
  sig.hashes.assign(perms, kMersenne61);

  Rng rng(seed);
  std::vector<std::uint64_t> a(perms);
  std::vector<std::uint64_t> b(perms);
  for (int i = 0; i < perms; ++i) {
    a[i] = 1 + uniform_index(rng, kMersenne61 - 1);
    b[i] = uniform_index(rng, kMersenne61);
  }
  for (const auto& e : elements) {
    const std::uint64_t h = stable_hash(e.data(), e.size()) % kMersenne61;
    for (int i = 0; i < perms; ++i) {
      const std::uint64_t v =
          mod61(static_cast<Uint128>(a[i]) * h + b[i]);
      if (v < sig.hashes[i]) sig.hashes[i] = v;
    }
  }
  return sig;
}

MinHashSignature column_signature(const Column& col, int perms,
                                  const std::vector<int>& gram_sizes,
                                  std::uint64_t seed) {
  return minhash_signature(signature_elements(col.values, gram_sizes), perms,
                           seed, col.ref());
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.perms != b.perms || a.hashes.size() != b.hashes.size()) {
    throw Error("signatures have different permutation counts");
  }
  std::size_t eq = 0;
  for (std::size_t i = 0; i < a.hashes.size(); ++i) {
    eq += a.hashes[i] == b.hashes[i];
  }
  return static_cast<double>(eq) / static_cast<double>(a.hashes.size());
}

double estimate_containment(const MinHashSignature& a,
                            const MinHashSignature& b) {
  if (a.set_size == 0) return 0.0;
  const double j = estimate_jaccard(a, b);
  double inter = j * static_cast<double>(a.set_size + b.set_size) / (1.0 + j);
  inter = std::min(inter, static_cast<double>(std::min(a.set_size, b.set_size)));
  return inter / static_cast<double>(a.set_size);
}

BandConfig optimal_bands(double threshold, int perms) {
  BandConfig best{1, perms};
  double best_err = std::numeric_limits<double>::infinity();
  for (int b = 1; b <= perms; ++b) {
    const int max_r = perms / b;
    for (int r = 1; r <= max_r; ++r) {
      const double fp = integrate(0.0, threshold, b, r, true);
      const double fn = integrate(threshold, 1.0, b, r, false);
      const double err = 0.5 * fp + 0.5 * fn;
      if (err < best_err) {
        best_err = err;
        best = {b, r};
      }
    }
  }
  return best;
}

namespace {

// Memoised because the containment query asks for many thresholds.
BandConfig cached_bands(double threshold, int perms,
                        const std::vector<int>& allowed_rows) {
  static thread_local std::map<std::tuple<long, int, std::size_t>, BandConfig>
      cache;
  const long bucket = std::lround(threshold * 1000.0);
  const auto key = std::make_tuple(bucket, perms, allowed_rows.size());
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const double t = bucket / 1000.0;
  BandConfig best{perms / allowed_rows.front(), allowed_rows.front()};
  double best_err = std::numeric_limits<double>::infinity();
  for (int r : allowed_rows) {
    for (int b = 1; b <= perms / r; ++b) {
      const double err = 0.5 * integrate(0.0, t, b, r, true) +
                         0.5 * integrate(t, 1.0, b, r, false);
      if (err < best_err) {
        best_err = err;
        best = {b, r};
      }
    }
  }
  cache.emplace(key, best);
  return best;
}

}  // namespace

std::vector<LshPair> lsh_index_and_query(
    const std::vector<MinHashSignature>& sigs, double threshold,
    bool containment) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error("LSH threshold must be in (0, 1]");
  }
  std::vector<LshPair> out;
  if (sigs.size() < 2) return out;
  const int perms = sigs.front().perms;
  for (const auto& s : sigs) {
    if (s.perms != perms) throw Error("signatures have different permutation counts");
  }

  std::set<std::pair<std::size_t, std::size_t>> candidates;
  auto add = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    if (sigs[i].column.table == sigs[j].column.table) return;
    candidates.insert({std::min(i, j), std::max(i, j)});
  };

  std::vector<std::size_t> all(sigs.size());
  for (std::size_t i = 0; i < sigs.size(); ++i) all[i] = i;

  if (!containment) {
    const BandConfig cfg = optimal_bands(threshold, perms);
    const BandTable table = build_table(sigs, all, cfg.bands, cfg.rows);
    for (std::size_t i = 0; i < sigs.size(); ++i) {
      std::vector<std::size_t> hits;
      probe(table, sigs[i], cfg.bands, hits);
      for (std::size_t j : hits) add(i, j);
    }
  } else {
    // Equal-count partitions by set size.
    std::vector<std::size_t> order = all;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return sigs[x].set_size < sigs[y].set_size;
    });
    const std::size_t parts = std::min<std::size_t>(8, order.size());
    std::vector<std::vector<std::size_t>> partition(parts);
    for (std::size_t k = 0; k < order.size(); ++k) {
      partition[k * parts / order.size()].push_back(order[k]);
    }
    std::vector<int> allowed_rows;
    for (int r : {1, 2, 3, 4, 5, 6, 8, 10, 12, 16}) {
      if (r <= perms) allowed_rows.push_back(r);
    }
    // tables[p][ri] indexes partition p with rows allowed_rows[ri] and every
    // band; a query then probes only its first `b` bands.
    std::vector<std::vector<BandTable>> tables(parts);
    for (std::size_t p = 0; p < parts; ++p) {
      for (int r : allowed_rows) {
        tables[p].push_back(build_table(sigs, partition[p], perms / r, r));
      }
    }
    for (std::size_t i = 0; i < sigs.size(); ++i) {
      const double q = static_cast<double>(sigs[i].set_size);
      for (std::size_t p = 0; p < parts; ++p) {
        if (partition[p].empty()) continue;
        const double upper =
            static_cast<double>(sigs[partition[p].back()].set_size);
        const double jt = std::clamp(
            threshold * q / (q + upper - threshold * q), 1e-3, 1.0);
        const BandConfig cfg = cached_bands(jt, perms, allowed_rows);
        const auto ri = static_cast<std::size_t>(
            std::find(allowed_rows.begin(), allowed_rows.end(), cfg.rows) -
            allowed_rows.begin());
        std::vector<std::size_t> hits;
        probe(tables[p][ri], sigs[i], cfg.bands, hits);
        for (std::size_t j : hits) add(i, j);
      }
    }
  }

  for (const auto& [i, j] : candidates) {
    const double score =
        containment ? std::max(estimate_containment(sigs[i], sigs[j]),
                               estimate_containment(sigs[j], sigs[i]))
                    : estimate_jaccard(sigs[i], sigs[j]);
    if (score < threshold) continue;
    LshPair pair;
    pair.a = sigs[i].column;
    pair.b = sigs[j].column;
    if (pair.b.key() < pair.a.key()) std::swap(pair.a, pair.b);
    pair.j_hat = score;
    out.push_back(std::move(pair));
  }
  std::sort(out.begin(), out.end(), [](const LshPair& x, const LshPair& y) {
    return std::make_pair(x.a.key(), x.b.key()) < std::make_pair(y.a.key(), y.b.key());
  });
  return out;
}

}  // namespace qjoin
