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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qjoin {

// Identifies a column as "table.column".
struct ColumnRef {
  std::string table;
  std::string column;

  std::string key() const { return table + "." + column; }

  auto operator<=>(const ColumnRef&) const = default;
};

struct Column {
  std::string table_id;
  std::string name;
  std::vector<std::string> values;  // nulls are empty strings
  bool is_numeric = false;

  ColumnRef ref() const { return {table_id, name}; }
};

struct Table {
  std::string id;
  std::vector<Column> columns;

  std::size_t row_count() const {
    return columns.empty() ? 0 : columns.front().values.size();
  }
  const Column* find(const std::string& name) const;
  // Throws MissingColumnError.
  const Column& column(const std::string& name) const;
};

struct Repository {
  std::filesystem::path root;
  std::map<std::string, Table> tables;
  std::vector<std::string> warnings;

  const Table& table(const std::string& id) const;
  // Throws MissingColumnError when the table or column does not exist.
  const Column& column(const ColumnRef& ref) const;
};

struct LoadOptions {
  std::optional<char> delimiter;  // default ','
  std::optional<std::size_t> max_rows;
  double numeric_threshold = 0.95;
};

// Loads every "*.csv" file directly under `root` (sorted by file name); the
// table id is the file stem. Unreadable or header-less files are skipped with
// a warning. Throws Error if the directory is missing or yields no tables.
Repository load_repository(const std::filesystem::path& root,
                           const LoadOptions& options = {});

// Builds a table from a header and rows, padding or truncating ragged rows
// and recording warnings. Shared by the loader and tests.
Table make_table(std::string id, std::vector<std::string> header,
                 std::vector<std::vector<std::string>> rows,
                 double numeric_threshold,
                 std::vector<std::string>* warnings = nullptr);

bool parses_as_number(std::string_view value);

struct ColumnStats {
  double avg_len = 0.0;
  double distinct_ratio = 0.0;
  double token_entropy = 0.0;
  double null_ratio = 0.0;
};

ColumnStats column_stats(const Column& col);

struct ValueSample {
  ColumnRef source;
  std::vector<std::size_t> indices;  // ascending row indices
  std::vector<std::string> values;
  double proportion = 1.0;
  std::uint64_t seed = 0;
};

// Rows below this count are always sampled in full.
inline constexpr std::size_t kSampleFloor = 20;

// Deterministic sample without replacement over the non-empty values:
// max(ceil(proportion * n), min(kSampleFloor, n)) rows, n = non-empty count.
ValueSample sample_column(const Column& col, double proportion,
                          std::uint64_t seed);

}  // namespace qjoin
