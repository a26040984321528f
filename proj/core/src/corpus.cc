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

#include "qjoin/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "qjoin/csv.h"
#include "qjoin/error.h"
#include "qjoin/random.h"
#include "qjoin/utf8.h"

namespace qjoin {

const Column* Table::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Column& Table::column(const std::string& name) const {
  if (const Column* c = find(name)) return *c;
  throw MissingColumnError(id, name);
}

const Table& Repository::table(const std::string& id) const {
  auto it = tables.find(id);
  if (it == tables.end()) throw Error("unknown table " + id);
  return it->second;
}

const Column& Repository::column(const ColumnRef& ref) const {
  auto it = tables.find(ref.table);
  if (it == tables.end()) throw MissingColumnError(ref.table, ref.column);
  return it->second.column(ref.column);
}

bool parses_as_number(std::string_view value) {
  std::size_t b = 0;
  std::size_t e = value.size();
  while (b < e && std::isspace(static_cast<unsigned char>(value[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(value[e - 1]))) --e;
  if (b == e) return false;
  const std::string trimmed(value.substr(b, e - b));
  char* end = nullptr;
  std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size()) return false;
  // strtod accepts "inf"/"nan"; those are words, not numbers, for our purposes.
  return std::any_of(trimmed.begin(), trimmed.end(),
                     [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
}

Table make_table(std::string id, std::vector<std::string> header,
                 std::vector<std::vector<std::string>> rows,
                 double numeric_threshold, std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(id + ": " + msg);
  };

  Table table;
  table.id = id;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = header[i];
    if (name.empty()) name = "column_" + std::to_string(i + 1);
    if (seen.count(name)) {
      std::string base = name;
      int n = 2;
      while (seen.count(base + "_" + std::to_string(n))) ++n;
      name = base + "_" + std::to_string(n);
      warn("duplicate column name '" + base + "' renamed to '" + name + "'");
    }
    seen.insert(name);
    Column col;
    col.table_id = id;
    col.name = std::move(name);
    col.values.reserve(rows.size());
    table.columns.push_back(std::move(col));
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.size() != header.size()) {
      warn("row " + std::to_string(r + 1) + " has " +
           std::to_string(row.size()) + " fields, expected " +
           std::to_string(header.size()));
      row.resize(header.size());
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      table.columns[c].values.push_back(std::move(row[c]));
    }
  }

  for (auto& col : table.columns) {
    std::size_t non_empty = 0;
    std::size_t numeric = 0;
    for (const auto& v : col.values) {
      if (v.empty()) continue;
      ++non_empty;
      if (parses_as_number(v)) ++numeric;
    }
    col.is_numeric = non_empty > 0 && static_cast<double>(numeric) >=
                                          numeric_threshold * non_empty;
  }
  return table;
}

Repository load_repository(const std::filesystem::path& root,
                           const LoadOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error("repository directory does not exist: " + root.string());
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Repository repo;
  repo.root = root;
  const char delimiter = options.delimiter.value_or(',');
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      repo.warnings.push_back(path.string() + ": unreadable, skipped");
      continue;
    }
    CsvReader reader(in, delimiter);
    CsvRow header;
    if (!reader.next(header) || (header.size() == 1 && header[0].empty())) {
      repo.warnings.push_back(path.string() + ": no header row, skipped");
      continue;
    }
    // Strip a UTF-8 byte order mark from the first header cell.
    if (header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

    std::vector<CsvRow> rows;
    CsvRow row;
    while (reader.next(row)) {
      if (row.size() == 1 && row[0].empty()) continue;  // blank line
      if (options.max_rows && rows.size() >= *options.max_rows) break;
      rows.push_back(row);
    }
    std::string id = path.stem().string();
    if (repo.tables.count(id)) {
      repo.warnings.push_back(path.string() + ": duplicate table id, skipped");
      continue;
    }
    repo.tables.emplace(id, make_table(id, std::move(header), std::move(rows),
                                       options.numeric_threshold,
                                       &repo.warnings));
  }
  if (repo.tables.empty()) {
    throw Error("repository contains no readable tables: " + root.string());
  }
  return repo;
}

ColumnStats column_stats(const Column& col) {
  ColumnStats stats;
  if (col.values.empty()) return stats;

  std::size_t non_empty = 0;
  std::size_t total_len = 0;
  std::unordered_set<std::string_view> distinct;
  std::unordered_map<std::string, std::size_t> tokens;
  std::size_t token_count = 0;
  for (const auto& v : col.values) {
    if (v.empty()) continue;
    ++non_empty;
    total_len += utf8_length(v);
    distinct.insert(v);
    std::size_t i = 0;
    while (i < v.size()) {
      while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
      std::size_t j = i;
      while (j < v.size() && !std::isspace(static_cast<unsigned char>(v[j]))) ++j;
      if (j > i) {
        ++tokens[v.substr(i, j - i)];
        ++token_count;
      }
      i = j;
    }
  }
  stats.null_ratio =
      static_cast<double>(col.values.size() - non_empty) / col.values.size();
  if (non_empty == 0) {
    stats.null_ratio = 0.0;  // all-empty column: all-zero stats
    return stats;
  }
  stats.avg_len = static_cast<double>(total_len) / non_empty;
  stats.distinct_ratio = static_cast<double>(distinct.size()) / non_empty;
  double h = 0.0;
  for (const auto& [tok, n] : tokens) {
    const double p = static_cast<double>(n) / token_count;
    h -= p * std::log2(p);
  }
  stats.token_entropy = std::max(0.0, h);
  return stats;
}

ValueSample sample_column(const Column& col, double proportion,
                          std::uint64_t seed) {
  ValueSample sample;
  sample.source = col.ref();
  sample.proportion = proportion;
  sample.seed = seed;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < col.values.size(); ++i) {
    if (!col.values[i].empty()) candidates.push_back(i);
  }
  const std::size_t n = candidates.size();
  if (n == 0) return sample;

  const auto wanted = static_cast<std::size_t>(
      std::ceil(std::clamp(proportion, 0.0, 1.0) * static_cast<double>(n)));
  const std::size_t size =
      std::min(n, std::max({wanted, std::min(kSampleFloor, n), std::size_t{1}}));

  if (size < n) {
    Rng rng(seed ^ stable_hash(sample.source.key().data(),
                               sample.source.key().size()));
    shuffle(candidates, rng);
    candidates.resize(size);
    std::sort(candidates.begin(), candidates.end());
  }
  sample.indices = std::move(candidates);
  sample.values.reserve(sample.indices.size());
  for (std::size_t i : sample.indices) sample.values.push_back(col.values[i]);
  return sample;
}

}  // namespace qjoin
