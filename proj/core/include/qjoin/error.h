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

#include <stdexcept>
#include <string>

namespace qjoin {

// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A chain or task references a column that is not present in its table.
class MissingColumnError : public Error {
 public:
  MissingColumnError(std::string table, std::string column)
      : Error("missing column " + table + "." + column),
        table_(std::move(table)),
        column_(std::move(column)) {}

  const std::string& table() const { return table_; }
  const std::string& column() const { return column_; }

 private:
  std::string table_;
  std::string column_;
};

// A column pair cannot be scored, e.g. one side has no non-empty values.
class UnusablePairError : public Error {
 public:
  using Error::Error;
};

// Configuration could not be parsed; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qjoin
