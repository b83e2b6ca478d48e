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

#include "peerlab/table.h"

#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "json.hpp"
#include "peerlab/errors.h"

namespace peerlab {

void Table::AddRow(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InputError("row has " + std::to_string(row.size()) +
                     " cells, table '" + name + "' has " +
                     std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatCell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return FormatDouble(std::get<double>(cell));
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void WriteCsv(std::ostream& out, const Table& table,
              const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << CsvField(table.columns[c]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << CsvField(FormatCell(row[c]));
    }
    out << '\n';
  }
}

void WriteJson(std::ostream& out, const Table& table,
               const std::vector<std::pair<std::string, std::string>>& meta) {
  nlohmann::ordered_json doc;
  doc["table"] = table.name;
  doc["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta) doc["meta"][k] = v;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      if (const auto* s = std::get_if<std::string>(&cell)) {
        obj[table.columns[c]] = *s;
      } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        obj[table.columns[c]] = *i;
      } else {
        const double v = std::get<double>(cell);
        if (std::isfinite(v)) {
          obj[table.columns[c]] = v;
        } else {
          obj[table.columns[c]] = FormatDouble(v);
        }
      }
    }
    doc["rows"].push_back(std::move(obj));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace peerlab
