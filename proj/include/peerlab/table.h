// Copyright 2026 The peerlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEERLAB_TABLE_H_
#define PEERLAB_TABLE_H_

// Small typed table written as CSV or JSON.

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace peerlab {

using Cell = std::variant<std::string, std::int64_t, double>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Throws InputError when the row width does not match the columns.
  void AddRow(std::vector<Cell> row);
};

// Shortest round-trip representation.
std::string FormatDouble(double v);
std::string FormatCell(const Cell& cell);

// Optional leading "# ..." comment line, then header and rows. Fields
// containing commas or quotes are quoted.
void WriteCsv(std::ostream& out, const Table& table,
              const std::string& comment = "");

// {"table": name, "meta": {...}, "rows": [{column: value}, ...]}.
void WriteJson(std::ostream& out, const Table& table,
               const std::vector<std::pair<std::string, std::string>>& meta);

}  // namespace peerlab

#endif  // PEERLAB_TABLE_H_
