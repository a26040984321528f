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

#include "qjoin/similarity.h"

#include <algorithm>
#include <numeric>
#include <thread>

#include "qjoin/error.h"
#include "qjoin/utf8.h"

namespace qjoin {

std::size_t lcs_substring(std::u32string_view s1, std::u32string_view s2) {
  if (s1.empty() || s2.empty()) return 0;
  if (s2.size() > s1.size()) std::swap(s1, s2);
  // prev[j] = length of the common suffix of s1[..i) and s2[..j).
  std::vector<std::uint32_t> prev(s2.size() + 1, 0);
  std::vector<std::uint32_t> cur(s2.size() + 1, 0);
  std::uint32_t best = 0;
  for (std::size_t i = 1; i <= s1.size(); ++i) {
    const char32_t a = s1[i - 1];
    for (std::size_t j = 1; j <= s2.size(); ++j) {
      if (a == s2[j - 1]) {
        const std::uint32_t v = prev[j - 1] + 1;
        cur[j] = v;
        if (v > best) best = v;
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

std::size_t lcs_substring(std::string_view s1, std::string_view s2) {
  return lcs_substring(std::u32string_view(decode_utf8(s1)),
                       std::u32string_view(decode_utf8(s2)));
}

namespace {

double alcs_from_lcs(std::size_t lcs, std::size_t len1, std::size_t len2,
                     const AlcsConfig& cfg) {
  if (lcs == 0 || lcs < static_cast<std::size_t>(cfg.min_significant_len)) {
    return 0.0;
  }
  return static_cast<double>(lcs) / (0.5 * static_cast<double>(len1 + len2));
}

}  // namespace

double alcs(std::u32string_view s1, std::u32string_view s2,
            const AlcsConfig& cfg) {
  return alcs_from_lcs(lcs_substring(s1, s2), s1.size(), s2.size(), cfg);
}

double alcs(std::string_view s1, std::string_view s2, const AlcsConfig& cfg) {
  const std::u32string a = decode_utf8(s1);
  const std::u32string b = decode_utf8(s2);
  return alcs(std::u32string_view(a), std::u32string_view(b), cfg);
}

std::set<std::string> qgrams(std::string_view s, int q) {
  std::set<std::string> out;
  if (q < 1) return out;
  const std::u32string text = decode_utf8(s);
  const auto uq = static_cast<std::size_t>(q);
  if (text.size() < uq) return out;
  for (std::size_t i = 0; i + uq <= text.size(); ++i) {
    out.insert(encode_utf8(std::u32string_view(text).substr(i, uq)));
  }
  return out;
}

double jaccard_qgram(std::string_view s1, std::string_view s2, int q) {
  const auto a = qgrams(s1, q);
  const auto b = qgrams(s2, q);
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& g : a) inter += b.count(g);
  return static_cast<double>(inter) /
         static_cast<double>(a.size() + b.size() - inter);
}

double AlcsMatrix::mean_row_max() const {
  if (row_max.empty()) return 0.0;
  return std::accumulate(row_max.begin(), row_max.end(), 0.0) /
         static_cast<double>(row_max.size());
}

AlcsMatrix alcs_matrix(const std::vector<std::string>& src,
                       const std::vector<std::string>& tgt,
                       const AlcsConfig& cfg) {
  if (src.empty() || tgt.empty()) {
    throw UnusablePairError("ALCS matrix needs non-empty source and target");
  }
  AlcsMatrix m;
  m.rows = src;
  m.cols = tgt;
  const std::size_t r = src.size();
  const std::size_t c = tgt.size();
  m.scores.assign(r * c, 0.0);
  m.lcs.assign(r * c, 0);
  m.row_max.assign(r, 0.0);
  m.row_argmax.assign(r, 0);

  std::vector<std::u32string> a(r);
  std::vector<std::u32string> b(c);
  for (std::size_t i = 0; i < r; ++i) a[i] = decode_utf8(src[i]);
  for (std::size_t j = 0; j < c; ++j) b[j] = decode_utf8(tgt[j]);

  auto fill_rows = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double best = -1.0;
      std::size_t best_lcs = 0;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t l = lcs_substring(a[i], b[j]);
        const double s = alcs_from_lcs(l, a[i].size(), b[j].size(), cfg);
        m.scores[i * c + j] = s;
        m.lcs[i * c + j] = l;
        if (s > best || (s == best && l > best_lcs)) {
          best = s;
          best_lcs = l;
          arg = j;
        }
      }
      m.row_max[i] = best;
      m.row_argmax[i] = arg;
    }
  };

  // Rows are independent; large matrices are split across threads.
  const std::size_t work = r * c;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads =
      work < 20000 ? 1 : std::min<std::size_t>(hw, std::min<std::size_t>(r, 8));
  if (threads <= 1) {
    fill_rows(0, r);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (r + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(r, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(fill_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return m;
}

AlcsMatrix alcs_matrix(const ValueSample& src, const ValueSample& tgt,
                       const AlcsConfig& cfg) {
  if (src.values.empty() || tgt.values.empty()) {
    throw UnusablePairError("unusable pair " + src.source.key() + " / " +
                            tgt.source.key() + ": empty sample");
  }
  return alcs_matrix(src.values, tgt.values, cfg);
}

std::vector<std::size_t> top_targets(const AlcsMatrix& m, std::size_t row,
                                     std::size_t k) {
  std::vector<std::size_t> idx(m.col_count());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t base = row * m.col_count();
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    if (m.scores[base + x] != m.scores[base + y]) {
      return m.scores[base + x] > m.scores[base + y];
    }
    return m.lcs[base + x] > m.lcs[base + y];
  });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

}  // namespace qjoin
