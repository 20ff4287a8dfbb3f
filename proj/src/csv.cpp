// Copyright 2026 FairLENS contributors
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


#include "fairlens/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "fairlens/error.hpp"

namespace fairlens {
namespace {

using nlohmann::json;

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  char c;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
    if (!(row.size() == 1 && row.front().empty())) rows.push_back(std::move(row));
    row.clear();
  };
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw ValidationError("csv line " + std::to_string(line) + ": stray quote in field");
        quoted = field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        if (in.peek() != '\n') field += c;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw ValidationError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::size_t csv_to_manifest(std::istream& csv, const AttributeSchema& schema, std::ostream& out) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw ValidationError("csv: missing header row");
  const auto& header = rows.front();
  auto column = [&header](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("id");
  const auto ref_col = column("reference");
  if (!id_col || !ref_col) throw ValidationError("csv: header needs 'id' and 'reference' columns");
  const auto& attrs = schema.attributes();
  std::vector<std::size_t> attr_cols;
  for (const auto& a : attrs) {
    const auto col = column(a.name);
    if (!col) throw ValidationError("csv: header lacks attribute column '" + a.name + "'");
    attr_cols.push_back(*col);
  }

  const bool dialogue = schema.mode() == SchemaMode::dialogue;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw ValidationError("csv row " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(row.size()));
    }
    json attributes = json::object();
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const auto& cell = row[attr_cols[a]];
      auto value = [&](const std::string& s) -> json {
        if (attrs[a].name == "Age") {
          if (auto v = as_number(s)) return *v;
        }
        return s;
      };
      if (dialogue) {
        const auto bar = cell.find('|');
        if (bar == std::string::npos) {
          throw ValidationError("csv row " + std::to_string(r + 1) + ": dialogue attribute '" + attrs[a].name +
                                "' needs two labels written X|Y");
        }
        attributes[attrs[a].name] = json::array({value(cell.substr(0, bar)), value(cell.substr(bar + 1))});
      } else {
        attributes[attrs[a].name] = value(cell);
      }
    }
    json record{{"id", row[*id_col]}, {"reference", row[*ref_col]}, {"attributes", attributes}};
    json metadata = json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i == *id_col || i == *ref_col) continue;
      if (std::find(attr_cols.begin(), attr_cols.end(), i) != attr_cols.end()) continue;
      metadata[header[i]] = row[i];
    }
    if (!metadata.empty()) record["metadata"] = metadata;
    out << record.dump() << '\n';
  }
  return rows.size() - 1;
}

}  // namespace fairlens
