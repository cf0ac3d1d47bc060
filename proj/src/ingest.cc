// Copyright 2026 The GETF Authors. All Rights Reserved.
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

#include "getf/ingest.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "getf/error.h"
#include "getf/io.h"

namespace getf {

IngestSpec IngestSpec::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("ingest spec: ") + e.what());
  }
  IngestSpec spec;
  if (!j.is_object() || !j.contains("modes") || !j["modes"].is_array()) {
    throw Error(ErrorKind::kSpec, "ingest spec needs a 'modes' array");
  }
  static const std::map<std::string, DateComponent> kComponents = {
      {"year", DateComponent::kYear},
      {"month", DateComponent::kMonth},
      {"day", DateComponent::kDay},
      {"weekday", DateComponent::kWeekday},
      {"day_of_year", DateComponent::kDayOfYear}};
  for (const auto& m : j["modes"]) {
    ModeBinding b;
    if (!m.contains("column") || !m["column"].is_string()) {
      throw Error(ErrorKind::kSpec, "every mode needs a 'column' name");
    }
    b.column = m["column"].get<std::string>();
    const std::string mapping = m.value("mapping", "categorical");
    if (mapping == "categorical") {
      b.mapping = ColumnMapping::kCategorical;
    } else if (mapping == "binned") {
      b.mapping = ColumnMapping::kBinned;
      if (!m.contains("edges") || !m["edges"].is_array()) {
        throw Error(ErrorKind::kSpec, "binned column '" + b.column +
                                          "' needs an 'edges' array");
      }
      for (const auto& e : m["edges"]) {
        if (!e.is_number()) {
          throw Error(ErrorKind::kSpec, "bin edges must be numbers");
        }
        b.edges.push_back(e.get<double>());
      }
      if (b.edges.size() < 2 ||
          std::adjacent_find(b.edges.begin(), b.edges.end(),
                             std::greater_equal<>()) != b.edges.end()) {
        throw Error(ErrorKind::kSpec, "bin edges of '" + b.column +
                                          "' must be >= 2 increasing values");
      }
    } else if (mapping == "date") {
      b.mapping = ColumnMapping::kDate;
      const std::string comp = m.value("component", "");
      const auto it = kComponents.find(comp);
      if (it == kComponents.end()) {
        throw Error(ErrorKind::kSpec, "unknown date component '" + comp + "'");
      }
      b.component = it->second;
    } else {
      throw Error(ErrorKind::kSpec, "unknown mapping '" + mapping + "'");
    }
    spec.modes.push_back(std::move(b));
  }
  if (spec.modes.size() < 2 || spec.modes.size() > 8) {
    throw Error(ErrorKind::kSpec, "an ingest spec binds 2 to 8 modes");
  }
  return spec;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text,
                                                std::vector<int64_t>* lines) {
  std::vector<std::vector<std::string>> rows;
  int64_t row_line = 1;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  int64_t line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) {
      rows.push_back(std::move(row));
      if (lines != nullptr) lines->push_back(row_line);
    }
    row.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
      ++line;
      row_line = line;
    } else if (c == '\r') {
      // Tolerate CRLF line endings.
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorKind::kParse,
                "unterminated quoted field at line " + std::to_string(line));
  }
  if (field_started || !row.empty()) end_row();
  return rows;
}

namespace {

bool parse_fixed(std::string_view s, int64_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && end[-1] == ' ') --end;
  if (begin == end) return false;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

bool extract_date_component(std::string_view value, DateComponent component,
                            int64_t& out) {
  if (value.size() < 10 || value[4] != '-' || value[7] != '-') return false;
  if (value.size() > 10 && value[10] != 'T' && value[10] != ' ') return false;
  int64_t y = 0, m = 0, d = 0;
  if (!parse_fixed(value.substr(0, 4), y) || !parse_fixed(value.substr(5, 2), m) ||
      !parse_fixed(value.substr(8, 2), d)) {
    return false;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{static_cast<int>(y)},
                           month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  switch (component) {
    case DateComponent::kYear:
      out = y;
      break;
    case DateComponent::kMonth:
      out = m;
      break;
    case DateComponent::kDay:
      out = d;
      break;
    case DateComponent::kWeekday:
      // ISO numbering, Monday = 1.
      out = weekday{sys_days{ymd}}.iso_encoding();
      break;
    case DateComponent::kDayOfYear:
      out = (sys_days{ymd} - sys_days{year{static_cast<int>(y)} / January / 1})
                .count() + 1;
      break;
  }
  return true;
}

IngestResult ingest_csv_text(std::string_view csv, const IngestSpec& spec) {
  std::vector<int64_t> lines;
  const auto rows = parse_csv(csv, &lines);
  if (rows.size() < 2) {
    throw Error(ErrorKind::kEmptyTensor, "CSV has no records");
  }
  const auto& header = rows.front();
  const int k = static_cast<int>(spec.modes.size());
  std::vector<size_t> column(k);
  for (int a = 0; a < k; ++a) {
    const auto it =
        std::find(header.begin(), header.end(), spec.modes[a].column);
    if (it == header.end()) {
      throw Error(ErrorKind::kSpec,
                  "column '" + spec.modes[a].column + "' not in CSV header");
    }
    column[a] = static_cast<size_t>(it - header.begin());
  }

  // First pass: map each value to a key per mode, rejecting bad records.
  // Keys are strings for categorical modes and integers otherwise.
  struct Keyed {
    int64_t line;
    std::vector<std::string> text;
    std::vector<int64_t> number;
  };
  IngestResult result{BoolTensor({1, 1}), {}, {}, 0};
  std::vector<Keyed> accepted;
  std::vector<std::set<std::string>> text_keys(k);
  std::vector<std::set<int64_t>> number_keys(k);
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++result.records;
    Keyed rec{lines[r], std::vector<std::string>(k),
              std::vector<int64_t>(k, 0)};
    std::string reason;
    for (int a = 0; a < k && reason.empty(); ++a) {
      const ModeBinding& b = spec.modes[a];
      if (column[a] >= row.size()) {
        reason = "missing field '" + b.column + "'";
        break;
      }
      const std::string& v = row[column[a]];
      switch (b.mapping) {
        case ColumnMapping::kCategorical:
          rec.text[a] = v;
          break;
        case ColumnMapping::kBinned: {
          double d = 0;
          if (!parse_double(v, d)) {
            reason = "'" + v + "' in '" + b.column + "' is not a number";
          } else if (d < b.edges.front() || d > b.edges.back()) {
            reason = "'" + v + "' in '" + b.column + "' is outside the bins";
          } else {
            const auto it =
                std::upper_bound(b.edges.begin(), b.edges.end(), d);
            int64_t bin = (it - b.edges.begin()) - 1;
            bin = std::min<int64_t>(bin,
                                    static_cast<int64_t>(b.edges.size()) - 2);
            rec.number[a] = bin;
          }
          break;
        }
        case ColumnMapping::kDate:
          if (!extract_date_component(v, b.component, rec.number[a])) {
            reason = "'" + v + "' in '" + b.column + "' is not a valid date";
          }
          break;
      }
    }
    if (!reason.empty()) {
      result.rejects.push_back({rec.line, reason});
      continue;
    }
    for (int a = 0; a < k; ++a) {
      if (spec.modes[a].mapping == ColumnMapping::kCategorical) {
        text_keys[a].insert(rec.text[a]);
      } else if (spec.modes[a].mapping == ColumnMapping::kDate) {
        number_keys[a].insert(rec.number[a]);
      }
    }
    accepted.push_back(std::move(rec));
  }
  if (accepted.empty()) {
    throw Error(ErrorKind::kEmptyTensor,
                "all " + std::to_string(result.records) +
                    " records were rejected");
  }

  std::vector<int64_t> shape(k);
  result.dictionaries.resize(k);
  for (int a = 0; a < k; ++a) {
    const ModeBinding& b = spec.modes[a];
    auto& dict = result.dictionaries[a];
    switch (b.mapping) {
      case ColumnMapping::kCategorical:
        dict.assign(text_keys[a].begin(), text_keys[a].end());
        break;
      case ColumnMapping::kDate:
        for (int64_t v : number_keys[a]) dict.push_back(std::to_string(v));
        break;
      case ColumnMapping::kBinned:
        for (size_t i = 0; i + 1 < b.edges.size(); ++i) {
          nlohmann::json lo = b.edges[i], hi = b.edges[i + 1];
          dict.push_back("[" + lo.dump() + "," + hi.dump() +
                         (i + 2 == b.edges.size() ? "]" : ")"));
        }
        break;
    }
    shape[a] = static_cast<int64_t>(dict.size());
  }
  std::vector<std::map<std::string, int64_t>> text_index(k);
  std::vector<std::map<int64_t, int64_t>> number_index(k);
  for (int a = 0; a < k; ++a) {
    for (const std::string& v : text_keys[a]) {
      text_index[a].emplace(v, static_cast<int64_t>(text_index[a].size()));
    }
    for (int64_t v : number_keys[a]) {
      number_index[a].emplace(v, static_cast<int64_t>(number_index[a].size()));
    }
  }
  BoolTensor x(shape);
  std::vector<int64_t> strides(k, 1);
  for (int a = k - 2; a >= 0; --a) strides[a] = strides[a + 1] * shape[a + 1];
  for (const Keyed& rec : accepted) {
    int64_t linear = 0;
    for (int a = 0; a < k; ++a) {
      int64_t index = 0;
      switch (spec.modes[a].mapping) {
        case ColumnMapping::kCategorical:
          index = text_index[a].at(rec.text[a]);
          break;
        case ColumnMapping::kDate:
          index = number_index[a].at(rec.number[a]);
          break;
        case ColumnMapping::kBinned:
          index = rec.number[a];
          break;
      }
      linear += index * strides[a];
    }
    x.set(linear);
  }
  result.tensor = std::move(x);
  return result;
}

IngestResult ingest_csv(const std::filesystem::path& path,
                        const IngestSpec& spec) {
  return ingest_csv_text(read_file(path), spec);
}

}  // namespace getf
