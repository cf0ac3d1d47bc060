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

#include "getf/io.h"

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "getf/error.h"

namespace getf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view token, int64_t& value) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void parse_fail(std::string_view source, int64_t line,
                             const std::string& what) {
  throw Error(ErrorKind::kParse, std::string(source) + ":" +
                                     std::to_string(line) + ": " + what);
}

}  // namespace

BoolTensor parse_coo(std::istream& in, std::string_view source) {
  std::string raw;
  int64_t line_no = 0;
  std::vector<int64_t> shape;
  bool have_shape = false;
  std::vector<int64_t> linear_ids;
  std::vector<int64_t> strides;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = split_ws(line);
    if (!have_shape) {
      if (tokens.front() != "shape") {
        parse_fail(source, line_no, "expected 'shape m_1 ... m_k' header");
      }
      for (size_t i = 1; i < tokens.size(); ++i) {
        int64_t m = 0;
        if (!parse_int(tokens[i], m) || m < 1) {
          parse_fail(source, line_no,
                     "bad mode length '" + std::string(tokens[i]) + "'");
        }
        shape.push_back(m);
      }
      try {
        checked_entry_count(shape);
      } catch (const Error& e) {
        parse_fail(source, line_no, e.what());
      }
      strides.assign(shape.size(), 1);
      for (int a = static_cast<int>(shape.size()) - 2; a >= 0; --a) {
        strides[a] = strides[a + 1] * shape[a + 1];
      }
      have_shape = true;
      continue;
    }
    if (tokens.size() != shape.size()) {
      parse_fail(source, line_no,
                 "expected " + std::to_string(shape.size()) +
                     " indices, found " + std::to_string(tokens.size()));
    }
    int64_t linear = 0;
    for (size_t a = 0; a < tokens.size(); ++a) {
      int64_t v = 0;
      if (!parse_int(tokens[a], v)) {
        parse_fail(source, line_no,
                   "bad index '" + std::string(tokens[a]) + "'");
      }
      if (v < 1 || v > shape[a]) {
        parse_fail(source, line_no,
                   "index " + std::to_string(v) + " out of bounds for mode " +
                       std::to_string(a + 1) + " (length " +
                       std::to_string(shape[a]) + ")");
      }
      linear += (v - 1) * strides[a];
    }
    linear_ids.push_back(linear);
  }
  if (!have_shape) parse_fail(source, line_no, "missing shape header");
  BoolTensor x(shape);
  for (int64_t linear : linear_ids) x.set(linear);
  return x;
}

std::string format_coo(const BoolTensor& x) {
  std::string out(kCooVersionLine);
  out += "\nshape";
  for (int64_t m : x.shape()) out += " " + std::to_string(m);
  out += "\n";
  std::vector<int64_t> coords(static_cast<size_t>(x.order()));
  x.for_each_one([&](int64_t linear) {
    x.unravel(linear, coords);
    for (size_t a = 0; a < coords.size(); ++a) {
      if (a > 0) out += ' ';
      out += std::to_string(coords[a] + 1);
    }
    out += '\n';
  });
  return out;
}

BoolTensor load_coo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return parse_coo(in, path.string());
}

void save_coo(const BoolTensor& x, const std::filesystem::path& path) {
  write_file_atomic(path, format_coo(x));
}

namespace {

std::filesystem::path mode_file(int mode) {
  return "mode_" + std::to_string(mode) + ".csv";
}

BitMatrix parse_matrix_csv(const std::string& text, const std::string& source) {
  BitMatrix m;
  std::istringstream in(text);
  std::string raw;
  int64_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) {
      parse_fail(source, line_no, "empty row");
    }
    int64_t cols = 0;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      const std::string_view cell = trim(line.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start));
      if (cell != "0" && cell != "1") {
        parse_fail(source, line_no, "value '" + std::string(cell) +
                                        "' is not 0 or 1");
      }
      m.data.push_back(cell == "1" ? 1 : 0);
      ++cols;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (m.rows == 0) {
      m.cols = cols;
    } else if (cols != m.cols) {
      parse_fail(source, line_no, "row has " + std::to_string(cols) +
                                      " columns, expected " +
                                      std::to_string(m.cols));
    }
    ++m.rows;
  }
  return m;
}

}  // namespace

FactorSet load_factors(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, manifest_path.string() + ": " + e.what());
  }
  std::vector<int64_t> shape;
  int64_t rank = 0;
  std::vector<std::string> files;
  try {
    if (manifest.at("format") != kFactorFormat) {
      throw Error(ErrorKind::kParse,
                  manifest_path.string() + ": unknown format");
    }
    shape = manifest.at("shape").get<std::vector<int64_t>>();
    rank = manifest.at("rank").get<int64_t>();
    files = manifest.at("files").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, manifest_path.string() + ": " + e.what());
  }
  if (files.size() != shape.size()) {
    throw Error(ErrorKind::kParse,
                manifest_path.string() + ": one file per mode expected");
  }
  checked_entry_count(shape);
  if (rank == 0) return FactorSet(shape);
  std::vector<BitMatrix> matrices;
  for (size_t a = 0; a < files.size(); ++a) {
    const std::filesystem::path p = dir / files[a];
    BitMatrix m = parse_matrix_csv(read_file(p), p.string());
    if (m.rows != shape[a] || m.cols != rank) {
      throw Error(ErrorKind::kShape,
                  p.string() + ": expected " + std::to_string(shape[a]) +
                      " x " + std::to_string(rank) + " matrix");
    }
    matrices.push_back(std::move(m));
  }
  return FactorSet::from_matrices(matrices);
}

void save_factors(const FactorSet& factors, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());
  nlohmann::ordered_json manifest;
  manifest["format"] = kFactorFormat;
  manifest["version"] = kFactorFormatVersion;
  manifest["shape"] = factors.shape();
  manifest["rank"] = factors.rank();
  std::vector<std::string> files;
  for (int mode = 1; mode <= factors.order(); ++mode) {
    files.push_back(mode_file(mode).string());
    std::string text;
    if (factors.rank() > 0) {
      const BitMatrix m = factors.matrix(mode);
      for (int64_t r = 0; r < m.rows; ++r) {
        for (int64_t c = 0; c < m.cols; ++c) {
          if (c > 0) text += ',';
          text += m.at(r, c) ? '1' : '0';
        }
        text += '\n';
      }
    }
    write_file_atomic(dir / files.back(), text);
  }
  manifest["files"] = files;
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string format_trace(const DecompositionResult& result) {
  std::string out = "iteration,error,cumulative_ms\n";
  out += "0," + std::to_string(result.initial_error) + ",0\n";
  double cumulative = 0.0;
  char buf[32];
  for (size_t i = 0; i < result.error_trace.size(); ++i) {
    cumulative += result.iteration_ms[i];
    std::snprintf(buf, sizeof buf, "%.3f", cumulative);
    out += std::to_string(i + 1) + "," + std::to_string(result.error_trace[i]) +
           "," + buf + "\n";
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  const std::filesystem::path parent = path.parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::kIo, "cannot replace " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace getf
