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

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qjoin {

using CsvRow = std::vector<std::string>;

// RFC-4180 reader: quoted fields may contain delimiters, doubled quotes and
// line breaks. Both LF and CRLF line endings are accepted.
class CsvReader {
 public:
  CsvReader(std::istream& in, char delimiter = ',')
      : in_(in), delimiter_(delimiter) {}

  // Reads the next record. Returns false at end of input.
  bool next(CsvRow& row);

  // 1-based line number where the last record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Quotes a field only when it contains the delimiter, a quote or a newline.
std::string csv_escape(std::string_view field, char delimiter = ',');

void write_csv_row(std::ostream& out, const CsvRow& row, char delimiter = ',');

// Fixed-point text for reports; -0 prints as 0.
std::string format_number(double value, int precision = 6);

}  // namespace qjoin
