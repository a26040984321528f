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

#include "qjoin/csv.h"

#include <cstdio>

namespace qjoin {

bool CsvReader::next(CsvRow& row) {
  row.clear();
  int c = in_.get();
  if (c == EOF) return false;
  record_line_ = line_;

  std::string field;
  bool quoted = false;
  bool field_started = false;
  while (true) {
    if (c == EOF) {
      row.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
    } else if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == delimiter_) {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (ch == '\r' && in_.peek() == '\n') {
      // CRLF: the LF ends the record on the next iteration.
    } else if (ch == '\n') {
      ++line_;
      row.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
      field_started = true;
    }
    c = in_.get();
  }
}

std::string csv_escape(std::string_view field, char delimiter) {
  const bool needs_quotes =
      field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
      std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const CsvRow& row, char delimiter) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.put(delimiter);
    out << csv_escape(row[i], delimiter);
  }
  out.put('\n');
}

std::string format_number(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  std::string out(buf);
  if (out.find_first_not_of("-0.") == std::string::npos && out[0] == '-') {
    out.erase(0, 1);
  }
  return out;
}

}  // namespace qjoin
