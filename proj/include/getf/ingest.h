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

// Builds an existence tensor from CSV records: every record maps to one
// index tuple and sets that bit.
//
// Spec JSON:
//   {"modes": [
//     {"column": "type", "mapping": "categorical"},
//     {"column": "amount", "mapping": "binned", "edges": [0, 10, 100]},
//     {"column": "when", "mapping": "date", "component": "month"}]}
//
// Categorical and date modes index the distinct observed values in sorted
// order (strings lexicographically, date components numerically). Binned
// modes have one index per half-open bin [e_i, e_i+1); the last bin also
// takes its upper edge.

#ifndef GETF_INGEST_H_
#define GETF_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "getf/bool_tensor.h"

namespace getf {

enum class ColumnMapping { kCategorical, kBinned, kDate };
enum class DateComponent { kYear, kMonth, kDay, kWeekday, kDayOfYear };

struct ModeBinding {
  std::string column;
  ColumnMapping mapping = ColumnMapping::kCategorical;
  std::vector<double> edges;                        // binned only
  DateComponent component = DateComponent::kYear;   // date only
};

struct IngestSpec {
  std::vector<ModeBinding> modes;

  // Throws Error{kSpec} on an invalid spec and Error{kParse} on bad JSON.
  static IngestSpec from_json(std::string_view text);
};

struct IngestReject {
  int64_t line = 0;  // 1-based physical line of the record
  std::string reason;
};

struct IngestResult {
  BoolTensor tensor;
  // dictionaries[mode-1][index-1] is the label of that index.
  std::vector<std::vector<std::string>> dictionaries;
  std::vector<IngestReject> rejects;
  int64_t records = 0;
};

// RFC 4180 style: comma separated, double quotes with "" escapes, header
// row first. Blank lines are skipped. `lines`, if given, receives the
// 1-based line on which each returned row starts. Throws Error{kParse} on
// malformed CSV.
std::vector<std::vector<std::string>> parse_csv(
    std::string_view text, std::vector<int64_t>* lines = nullptr);

// Throws Error{kEmptyTensor} when the CSV has no records or every record
// is rejected, and Error{kSpec} when a bound column is missing.
IngestResult ingest_csv_text(std::string_view csv, const IngestSpec& spec);
IngestResult ingest_csv(const std::filesystem::path& path,
                        const IngestSpec& spec);

// Parses YYYY-MM-DD, optionally followed by 'T' or ' ' and a time part.
bool extract_date_component(std::string_view value, DateComponent component,
                            int64_t& out);

}  // namespace getf

#endif  // GETF_INGEST_H_
