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

#include "getf/bench.h"

#include <algorithm>
#include <cstdio>

#include "getf/error.h"
#include "getf/synth.h"
#include "getf/tensor_ops.h"

namespace getf {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.repeats < 1) {
    throw Error(ErrorKind::kParameter, "repeats must be >= 1");
  }
  if (options.orders.empty() || options.sizes.empty()) {
    throw Error(ErrorKind::kParameter, "orders and sizes must be non-empty");
  }
  std::vector<int64_t> sizes = options.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  options.config.validate();

  std::vector<BenchRow> rows;
  for (int order : options.orders) {
    for (int64_t m : sizes) {
      const std::vector<int64_t> shape(static_cast<size_t>(order), m);
      BenchRow row;
      row.order = order;
      row.m = m;
      row.n = checked_entry_count(shape);
      row.repeats = options.repeats;
      std::vector<double> total, per_iter, rank, rel;
      for (int r = -1; r < options.repeats; ++r) {
        SynthSpec spec{shape, options.rank, options.density, options.noise,
                       options.seed + static_cast<uint64_t>(r + 1)};
        const PlantedTensor planted = generate_planted(spec);
        const DecompositionResult result =
            getf_decompose(planted.tensor, options.config);
        if (r < 0) continue;  // warm-up
        const double ms = result.total_ms();
        total.push_back(ms);
        per_iter.push_back(
            ms / static_cast<double>(std::max<size_t>(1, result.iteration_ms.size())));
        rank.push_back(result.factors.rank());
        const int64_t err = result.error_trace.empty()
                                ? result.initial_error
                                : result.error_trace.back();
        rel.push_back(result.initial_error == 0
                          ? 0.0
                          : static_cast<double>(err) /
                                static_cast<double>(result.initial_error));
      }
      row.median_total_ms = median(total);
      row.median_iteration_ms = median(per_iter);
      row.median_rank = median(rank);
      row.median_relative_error = median(rel);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string format_bench_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "order,m,n,repeats,median_total_ms,median_iteration_ms,median_rank,"
      "median_relative_error\n";
  char buf[256];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%lld,%lld,%d,%.3f,%.3f,%.1f,%.6f\n",
                  r.order, static_cast<long long>(r.m),
                  static_cast<long long>(r.n), r.repeats, r.median_total_ms,
                  r.median_iteration_ms, r.median_rank,
                  r.median_relative_error);
    out += buf;
  }
  return out;
}

}  // namespace getf
