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

#include "qjoin/operators.h"

#include <algorithm>
#include <cctype>

#include "qjoin/error.h"
#include "qjoin/utf8.h"

namespace qjoin {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string trim_ascii(std::string_view v) {
  std::size_t b = 0;
  std::size_t e = v.size();
  while (b < e && is_space(v[b])) ++b;
  while (e > b && is_space(v[e - 1])) --e;
  return std::string(v.substr(b, e - b));
}

struct Term {
  std::string name;
  std::vector<std::string> args;
  std::vector<bool> quoted;
};

// Splits on `sep` outside double quotes.
std::vector<std::string> split_outside_quotes(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  bool in_quote = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quote) {
      cur += c;
      if (c == '\\' && i + 1 < text.size()) {
        cur += text[++i];
      } else if (c == '"') {
        in_quote = false;
      }
    } else if (c == '"') {
      in_quote = true;
      cur += c;
    } else if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_quote) throw Error("unterminated quote in chain text");
  parts.push_back(cur);
  return parts;
}

Term parse_term(std::string_view text) {
  Term t;
  const std::string s = trim_ascii(text);
  const auto open = s.find('(');
  if (open == std::string::npos) {
    t.name = s;
  } else {
    if (s.back() != ')') throw Error("malformed operator: " + s);
    t.name = trim_ascii(std::string_view(s).substr(0, open));
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    for (const auto& raw : split_outside_quotes(inner, ',')) {
      std::string a = trim_ascii(raw);
      if (!a.empty() && a.front() == '"') {
        if (a.size() < 2 || a.back() != '"') {
          throw Error("malformed string argument: " + a);
        }
        std::string v;
        for (std::size_t i = 1; i + 1 < a.size(); ++i) {
          if (a[i] == '\\' && i + 2 < a.size()) ++i;
          v += a[i];
        }
        t.args.push_back(v);
        t.quoted.push_back(true);
      } else {
        t.args.push_back(a);
        t.quoted.push_back(false);
      }
    }
  }
  if (t.name.empty()) throw Error("empty operator name in chain text");
  return t;
}

int parse_k(const Term& t) {
  if (t.args.size() != 1) throw Error(t.name + " takes one argument");
  try {
    std::size_t used = 0;
    const int k = std::stoi(t.args[0], &used);
    if (used != t.args[0].size() || k < 1) throw Error("bad length");
    return k;
  } catch (const std::exception&) {
    throw Error("bad length argument for " + t.name + ": " + t.args[0]);
  }
}

}  // namespace

std::string Operator::name() const {
  switch (kind) {
    case OpKind::kLowercase: return "lowercase";
    case OpKind::kUppercase: return "uppercase";
    case OpKind::kTrim: return "trim";
    case OpKind::kRemovePunct: return "remove_punct";
    case OpKind::kRemoveWhitespace: return "remove_whitespace";
    case OpKind::kCollapseWhitespace: return "collapse_whitespace";
    case OpKind::kSplitKeep: return "split_keep";
    case OpKind::kPrefix: return "prefix";
    case OpKind::kSuffix: return "suffix";
    case OpKind::kConcatFront: return "concat_front";
    case OpKind::kConcatBack: return "concat_back";
  }
  return "unknown";
}

std::string Operator::id() const {
  switch (kind) {
    case OpKind::kSplitKeep:
      return name() + "(" + quote(text) + "," + (first ? "first" : "last") + ")";
    case OpKind::kPrefix:
    case OpKind::kSuffix:
      return name() + "(" + std::to_string(k) + ")";
    case OpKind::kConcatFront:
    case OpKind::kConcatBack:
      return name() + "(" + quote(text) + ")";
    default:
      return name();
  }
}

const std::vector<Operator>& default_library() {
  static const std::vector<Operator> lib = [] {
    std::vector<Operator> ops;
    for (OpKind k : {OpKind::kLowercase, OpKind::kUppercase, OpKind::kTrim,
                     OpKind::kRemovePunct, OpKind::kRemoveWhitespace,
                     OpKind::kCollapseWhitespace}) {
      ops.push_back({k, "", true, 0});
    }
    for (const char* d : {" ", ",", "-", "_", "@", "/"}) {
      ops.push_back({OpKind::kSplitKeep, d, true, 0});
      ops.push_back({OpKind::kSplitKeep, d, false, 0});
    }
    for (int k = 1; k <= 3; ++k) ops.push_back({OpKind::kPrefix, "", true, k});
    for (int k = 1; k <= 3; ++k) ops.push_back({OpKind::kSuffix, "", true, k});
    for (OpKind k : {OpKind::kConcatFront, OpKind::kConcatBack}) {
      for (const char* sep : {"", " ", ", "}) ops.push_back({k, sep, true, 0});
    }
    return ops;
  }();
  return lib;
}

std::string apply_unary(const Operator& op, std::string_view v) {
  std::string out;
  switch (op.kind) {
    case OpKind::kLowercase:
      out.assign(v);
      for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      return out;
    case OpKind::kUppercase:
      out.assign(v);
      for (char& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      }
      return out;
    case OpKind::kTrim:
      return trim_ascii(v);
    case OpKind::kRemovePunct:
      for (char c : v) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x80 && std::ispunct(u)) continue;
        out += c;
      }
      return out;
    case OpKind::kRemoveWhitespace:
      for (char c : v) {
        if (!is_space(c)) out += c;
      }
      return out;
    case OpKind::kCollapseWhitespace: {
      bool pending = false;
      for (char c : trim_ascii(v)) {
        if (is_space(c)) {
          pending = true;
          continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
      }
      return out;
    }
    case OpKind::kSplitKeep: {
      if (op.text.empty()) return std::string(v);
      const auto pos = op.first ? v.find(op.text) : v.rfind(op.text);
      if (pos == std::string_view::npos) return std::string(v);
      return op.first ? std::string(v.substr(0, pos))
                      : std::string(v.substr(pos + op.text.size()));
    }
    case OpKind::kPrefix:
    case OpKind::kSuffix: {
      const std::u32string u = decode_utf8(v);
      const auto k = static_cast<std::size_t>(std::max(op.k, 0));
      if (u.size() <= k) return std::string(v);
      return op.kind == OpKind::kPrefix
                 ? encode_utf8(std::u32string_view(u).substr(0, k))
                 : encode_utf8(std::u32string_view(u).substr(u.size() - k));
    }
    case OpKind::kConcatFront:
    case OpKind::kConcatBack:
      break;
  }
  throw Error("operator " + op.id() + " is not unary");
}

std::string apply_concat(const Operator& op, std::string_view primary,
                         std::string_view partner) {
  const bool back = op.kind == OpKind::kConcatBack;
  if (!back && op.kind != OpKind::kConcatFront) {
    throw Error("operator " + op.id() + " is not a concatenation");
  }
  std::string_view left = back ? primary : partner;
  std::string_view right = back ? partner : primary;
  if (left.empty()) return std::string(right);
  if (right.empty()) return std::string(left);
  std::string out;
  out.reserve(left.size() + op.text.size() + right.size());
  out.append(left).append(op.text).append(right);
  return out;
}

std::vector<std::string> apply_operator(const Operator& op,
                                        const std::vector<std::string>& primary,
                                        const std::vector<std::string>* partner) {
  std::vector<std::string> out;
  out.reserve(primary.size());
  if (op.op_class() == OpClass::kConcat) {
    if (!partner || partner->size() != primary.size()) {
      throw Error("concatenation partner length does not match for " + op.id());
    }
    for (std::size_t i = 0; i < primary.size(); ++i) {
      out.push_back(apply_concat(op, primary[i], (*partner)[i]));
    }
  } else {
    for (const auto& v : primary) out.push_back(apply_unary(op, v));
  }
  return out;
}

std::string ChainStep::text() const {
  if (op.op_class() != OpClass::kConcat) return op.id();
  return op.name() + "(" + quote(op.text) + "," + quote(partner) + ")";
}

std::vector<std::string> OperatorChain::columns() const {
  std::vector<std::string> cols{base};
  for (const auto& s : steps) {
    if (s.op.op_class() == OpClass::kConcat &&
        std::find(cols.begin(), cols.end(), s.partner) == cols.end()) {
      cols.push_back(s.partner);
    }
  }
  return cols;
}

std::vector<ColumnRef> OperatorChain::base_columns(
    const std::string& table_id) const {
  std::vector<ColumnRef> refs;
  for (const auto& c : columns()) refs.push_back({table_id, c});
  return refs;
}

std::string OperatorChain::steps_text() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += '|';
    out += steps[i].text();
  }
  return out;
}

std::string OperatorChain::text() const {
  std::string out = "base(" + quote(base) + ")";
  for (const auto& s : steps) out += "|" + s.text();
  return out;
}

Operator parse_operator(std::string_view text, std::string* partner) {
  const Term t = parse_term(text);
  Operator op;
  auto no_args = [&](OpKind k) {
    if (!t.args.empty()) throw Error(t.name + " takes no arguments");
    op.kind = k;
  };
  if (t.name == "lowercase") {
    no_args(OpKind::kLowercase);
  } else if (t.name == "uppercase") {
    no_args(OpKind::kUppercase);
  } else if (t.name == "trim") {
    no_args(OpKind::kTrim);
  } else if (t.name == "remove_punct") {
    no_args(OpKind::kRemovePunct);
  } else if (t.name == "remove_whitespace") {
    no_args(OpKind::kRemoveWhitespace);
  } else if (t.name == "collapse_whitespace") {
    no_args(OpKind::kCollapseWhitespace);
  } else if (t.name == "split_keep") {
    if (t.args.size() != 2 || !t.quoted[0] ||
        (t.args[1] != "first" && t.args[1] != "last")) {
      throw Error("split_keep expects (\"delimiter\",first|last)");
    }
    op.kind = OpKind::kSplitKeep;
    op.text = t.args[0];
    op.first = t.args[1] == "first";
  } else if (t.name == "prefix" || t.name == "suffix") {
    op.kind = t.name == "prefix" ? OpKind::kPrefix : OpKind::kSuffix;
    op.k = parse_k(t);
  } else if (t.name == "concat_front" || t.name == "concat_back") {
    op.kind = t.name == "concat_front" ? OpKind::kConcatFront : OpKind::kConcatBack;
    if (t.args.empty() || t.args.size() > 2 || !t.quoted[0]) {
      throw Error(t.name + " expects (\"separator\"[,\"partner\"])");
    }
    op.text = t.args[0];
    if (t.args.size() == 2) {
      if (!partner) throw Error(t.name + ": partner not allowed here");
      *partner = t.args[1];
    } else if (partner) {
      throw Error(t.name + ": missing partner column");
    }
  } else {
    throw Error("unknown operator: " + t.name);
  }
  return op;
}

OperatorChain parse_chain(std::string_view text) {
  const auto parts = split_outside_quotes(text, '|');
  const Term head = parse_term(parts.front());
  if (head.name != "base" || head.args.size() != 1 || !head.quoted[0]) {
    throw Error("chain text must start with base(\"column\")");
  }
  OperatorChain chain;
  chain.base = head.args[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    ChainStep step;
    step.op = parse_operator(parts[i], &step.partner);
    chain.steps.push_back(std::move(step));
  }
  chain.max_len = std::max(chain.max_len, chain.steps.size());
  return chain;
}

std::vector<std::string> apply_steps(std::vector<std::string> values,
                                     const std::vector<ChainStep>& steps,
                                     const Table& table) {
  for (const auto& s : steps) {
    if (s.op.op_class() == OpClass::kConcat) {
      values = apply_operator(s.op, values, &table.column(s.partner).values);
    } else {
      values = apply_operator(s.op, values, nullptr);
    }
  }
  return values;
}

std::vector<std::string> compose_chain(const OperatorChain& chain,
                                       const Table& table) {
  if (chain.steps.size() > chain.max_len) {
    throw Error("chain exceeds its maximum length of " +
                std::to_string(chain.max_len));
  }
  return apply_steps(table.column(chain.base).values, chain.steps, table);
}

std::string Action::id(const std::vector<Operator>& library) const {
  const Operator& op = library.at(op_index);
  ChainStep step{op, partner};
  return std::string(side == 0 ? "A:" : "B:") + step.text();
}

bool ExclusionDicts::excluded(const Operator& op, const std::string& slot,
                              const std::string& partner) const {
  const Key key{slot, partner, op.text};
  if (op.kind == OpKind::kConcatFront) return front_excluded.count(key) > 0;
  if (op.kind == OpKind::kConcatBack) return back_excluded.count(key) > 0;
  return false;
}

void ExclusionDicts::record(const Operator& op, const std::string& slot,
                            const std::string& partner, double reward) {
  if (op.op_class() != OpClass::kConcat) return;
  if (reward > 0.0) {
    auto touches = [&](const Key& k) {
      return std::get<0>(k) == slot || std::get<1>(k) == slot;
    };
    std::erase_if(front_excluded, touches);
    std::erase_if(back_excluded, touches);
    return;
  }
  const Key mirror{partner, slot, op.text};
  if (op.kind == OpKind::kConcatBack) {
    front_excluded.insert(mirror);
  } else {
    back_excluded.insert(mirror);
  }
}

std::vector<Action> enumerate_actions(const std::vector<SlotState>& slots,
                                      const ExclusionDicts& dicts,
                                      const std::vector<Operator>& library) {
  std::vector<Action> actions;
  std::vector<const SlotState*> order;
  for (const auto& s : slots) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(),
                   [](const SlotState* a, const SlotState* b) {
                     return a->side < b->side;
                   });
  for (const SlotState* slot : order) {
    for (std::size_t i = 0; i < library.size(); ++i) {
      const Operator& op = library[i];
      if (op.op_class() != OpClass::kConcat) {
        actions.push_back({slot->side, i, ""});
        continue;
      }
      for (const auto& col : slot->table->columns) {
        if (col.name == slot->column) continue;
        if (dicts.excluded(op, slot->key(), slot->table->id + "." + col.name)) {
          continue;
        }
        actions.push_back({slot->side, i, col.name});
      }
    }
  }
  return actions;
}

}  // namespace qjoin
