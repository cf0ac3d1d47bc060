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

// Scaling study over planted tensors: for every (order, mode length) pair
// one unmeasured warm-up run is followed by `repeats` timed runs on fresh
// seeds, and medians are reported.

#ifndef GETF_BENCH_H_
#define GETF_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "getf/getf.h"

namespace getf {

struct BenchOptions {
  std::vector<int> orders = {2, 3, 4, 5};
  std::vector<int64_t> sizes = {8, 16};  // mode lengths
  int repeats = 5;
  int rank = 5;
  double density = 0.2;
  double noise = 0.0;
  uint64_t seed = 0;
  GetfConfig config;
};

struct BenchRow {
  int order = 0;
  int64_t m = 0;
  int64_t n = 0;  // m^order
  int repeats = 0;
  double median_total_ms = 0.0;
  double median_iteration_ms = 0.0;  // per run: total / iterations
  double median_rank = 0.0;
  double median_relative_error = 0.0;
};

// Rows are grouped by order (as given) with mode lengths ascending and
// deduplicated, so n strictly increases within an order. Throws
// Error{kParameter} on invalid options.
std::vector<BenchRow> run_bench(const BenchOptions& options);

std::string format_bench_csv(const std::vector<BenchRow>& rows);

}  // namespace getf

#endif  // GETF_BENCH_H_
