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

// Text interchange formats.
//
// COO tensor file:
//   # getf-coo v1
//   shape 4 5 6
//   1 2 3
//   ...
// One 1-based index tuple per set entry. Lines starting with '#' and blank
// lines are ignored; duplicate tuples collapse. Entries are written in
// ascending linear order.
//
// Factor directory: manifest.json plus mode_<j>.csv for each mode, each an
// m_j x l matrix of 0/1 without a header row.

#ifndef GETF_IO_H_
#define GETF_IO_H_

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "getf/bool_tensor.h"
#include "getf/getf.h"

namespace getf {

inline constexpr std::string_view kCooVersionLine = "# getf-coo v1";
inline constexpr std::string_view kFactorFormat = "getf-factors";
inline constexpr int kFactorFormatVersion = 1;

// Throws Error{kParse} naming `source` and the 1-based line number.
BoolTensor parse_coo(std::istream& in, std::string_view source = "<input>");
std::string format_coo(const BoolTensor& x);

BoolTensor load_coo(const std::filesystem::path& path);
void save_coo(const BoolTensor& x, const std::filesystem::path& path);

FactorSet load_factors(const std::filesystem::path& dir);
void save_factors(const FactorSet& factors, const std::filesystem::path& dir);

// Columns iteration,error,cumulative_ms; row 0 is the initial error |x|.
std::string format_trace(const DecompositionResult& result);

// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace getf

#endif  // GETF_IO_H_
