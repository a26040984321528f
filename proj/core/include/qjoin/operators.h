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
#include <tuple>
#include <vector>

#include "qjoin/corpus.h"

namespace qjoin {

enum class OpClass { kUnary, kConcat };

enum class OpKind {
  kLowercase,
  kUppercase,
  kTrim,
  kRemovePunct,
  kRemoveWhitespace,
  kCollapseWhitespace,
  kSplitKeep,
  kPrefix,
  kSuffix,
  kConcatFront,
  kConcatBack,
};

struct Operator {
  OpKind kind = OpKind::kLowercase;
  std::string text;   // split delimiter or concat separator
  bool first = true;  // split_keep: keep the first or the last token
  int k = 0;          // prefix/suffix length

  OpClass op_class() const {
    return kind == OpKind::kConcatFront || kind == OpKind::kConcatBack
               ? OpClass::kConcat
               : OpClass::kUnary;
  }
  std::string name() const;
  // Canonical id, e.g. `split_keep("@",first)` or `concat_back(", ")`.
  std::string id() const;

  bool operator==(const Operator& o) const {
    return kind == o.kind && text == o.text && first == o.first && k == o.k;
  }
};

// 24 unary operators followed by 6 concatenations (front/back x 3 separators).
const std::vector<Operator>& default_library();

// Case mapping, trimming and punctuation classes are ASCII-only; other
// scalars pass through untouched.
std::string apply_unary(const Operator& op, std::string_view value);

// Joins `primary` and `partner` in operator order. An empty side contributes
// nothing, separator included.
std::string apply_concat(const Operator& op, std::string_view primary,
                         std::string_view partner);

// Elementwise application. Concat operators need a partner list of the same
// length (throws Error otherwise); unary operators ignore it.
std::vector<std::string> apply_operator(const Operator& op,
                                        const std::vector<std::string>& primary,
                                        const std::vector<std::string>* partner);

struct ChainStep {
  Operator op;
  std::string partner;  // concat partner column in the slot's table

  std::string text() const;
  bool operator==(const ChainStep& o) const {
    return op == o.op && partner == o.partner;
  }
};

inline constexpr std::size_t kDefaultMaxChainLen = 6;

struct OperatorChain {
  std::string base;  // slot column the chain starts from
  std::vector<ChainStep> steps;
  std::size_t max_len = kDefaultMaxChainLen;

  bool empty() const { return steps.empty(); }
  std::size_t size() const { return steps.size(); }
  // Base column first, then concat partners in first-use order.
  std::vector<std::string> columns() const;
  std::vector<ColumnRef> base_columns(const std::string& table_id) const;
  // `base("c")|op|op...`
  std::string text() const;
  std::string steps_text() const;

  bool operator==(const OperatorChain& o) const {
    return base == o.base && steps == o.steps;
  }
};

// Inverse of OperatorChain::text. Throws Error on malformed input.
OperatorChain parse_chain(std::string_view text);
Operator parse_operator(std::string_view text, std::string* partner = nullptr);

// Applies the chain to `table`; throws MissingColumnError when the base or a
// partner column is absent, or Error when the chain exceeds its max length.
std::vector<std::string> compose_chain(const OperatorChain& chain,
                                       const Table& table);

// Applies steps to already materialised values, pulling partners from table.
std::vector<std::string> apply_steps(std::vector<std::string> values,
                                     const std::vector<ChainStep>& steps,
                                     const Table& table);

struct SlotState {
  int side = 0;  // 0 = source, 1 = target
  const Table* table = nullptr;
  std::string column;

  std::string key() const { return table->id + "." + column; }
};

struct Action {
  int side = 0;
  std::size_t op_index = 0;
  std::string partner;

  // Canonical action id, e.g. `A:concat_back(", ","CANDFIRST")`.
  std::string id(const std::vector<Operator>& library) const;
  bool operator==(const Action& o) const {
    return side == o.side && op_index == o.op_index && partner == o.partner;
  }
};

// Concatenating b to the back of a equals concatenating a to the front of b,
// so a losing back-concat rules out its mirrored front-concat and vice versa.
struct ExclusionDicts {
  // (slot key, partner key, separator)
  using Key = std::tuple<std::string, std::string, std::string>;
  std::set<Key> front_excluded;
  std::set<Key> back_excluded;

  bool excluded(const Operator& op, const std::string& slot,
                const std::string& partner) const;
  // Non-positive reward excludes the mirror; positive reward on a concat
  // clears every exclusion touching the slot.
  void record(const Operator& op, const std::string& slot,
              const std::string& partner, double reward);
  void clear() {
    front_excluded.clear();
    back_excluded.clear();
  }
};

// Every (slot, operator[, partner]) action not ruled out by the dictionaries,
// ordered by side, library index, then partner column order.
std::vector<Action> enumerate_actions(const std::vector<SlotState>& slots,
                                      const ExclusionDicts& dicts,
                                      const std::vector<Operator>& library);

}  // namespace qjoin
