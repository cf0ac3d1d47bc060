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

#include "getf/synth.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "getf/error.h"
#include "getf/tensor_ops.h"

namespace getf {

PlantedTensor generate_planted(const SynthSpec& spec) {
  const int64_t entries = checked_entry_count(spec.shape);
  if (spec.rank < 1) throw Error(ErrorKind::kSpec, "rank must be >= 1");
  if (spec.rank > entries) {
    throw Error(ErrorKind::kSpec, "rank " + std::to_string(spec.rank) +
                                      " exceeds the number of entries");
  }
  if (!(spec.factor_density > 0.0 && spec.factor_density <= 1.0)) {
    throw Error(ErrorKind::kSpec, "factor density must lie in (0, 1]");
  }
  if (!(spec.noise_flip >= 0.0 && spec.noise_flip < 1.0)) {
    throw Error(ErrorKind::kSpec, "noise flip probability must lie in [0, 1)");
  }
  SynthRng rng(spec.seed);
  FactorSet truth(spec.shape);
  for (int l = 0; l < spec.rank; ++l) {
    Rank1Pattern p;
    for (int64_t m : spec.shape) {
      Fiber f(static_cast<size_t>(m), 0);
      do {
        for (auto& bit : f) bit = rng.bernoulli(spec.factor_density) ? 1 : 0;
      } while (fiber_is_zero(f));
      p.fibers.push_back(std::move(f));
    }
    truth.append(std::move(p));
  }
  BoolTensor x = reconstruct(truth);
  if (spec.noise_flip > 0.0) {
    for (int64_t i = 0; i < x.num_entries(); ++i) {
      if (rng.bernoulli(spec.noise_flip)) x.assign(i, !x.test(i));
    }
  }
  return {std::move(x), std::move(truth)};
}

namespace {

struct OracleSearch {
  const std::vector<int64_t>* shape = nullptr;
  int64_t total_ones = 0;
  int k = 0;
  std::vector<uint64_t> masks;
  std::vector<uint64_t> best_masks;
  int64_t best_error = std::numeric_limits<int64_t>::max();

  // `reduced` holds x summed over the chosen supports of axes < axis and
  // spans axes axis..k-1; `volume` is the product of those support sizes.
  void search(int axis, const std::vector<int64_t>& reduced, int64_t volume) {
    const int64_t m = (*shape)[axis];
    const int64_t rest = static_cast<int64_t>(reduced.size()) / m;
    const uint64_t limit = uint64_t{1} << m;
    std::vector<int64_t> next(static_cast<size_t>(rest));
    for (uint64_t mask = 1; mask < limit; ++mask) {
      masks[axis] = mask;
      const int64_t v = volume * std::popcount(mask);
      if (axis == k - 1) {
        int64_t covered = 0;
        for (int64_t i = 0; i < m; ++i) {
          if (mask >> i & 1) covered += reduced[i];
        }
        const int64_t error = total_ones + v - 2 * covered;
        if (error < best_error) {
          best_error = error;
          best_masks = masks;
        }
        continue;
      }
      std::fill(next.begin(), next.end(), 0);
      for (int64_t i = 0; i < m; ++i) {
        if (!(mask >> i & 1)) continue;
        for (int64_t r = 0; r < rest; ++r) next[r] += reduced[i * rest + r];
      }
      search(axis + 1, next, v);
    }
  }
};

}  // namespace

Rank1Pattern brute_force_best_rank1(const BoolTensor& x) {
  int64_t bits = 0;
  for (int64_t m : x.shape()) bits += m;
  if (bits > 24) {
    throw Error(ErrorKind::kBudget,
                "oracle candidate space 2^" + std::to_string(bits) +
                    " exceeds 2^24");
  }
  OracleSearch s;
  s.shape = &x.shape();
  s.total_ones = x.count();
  s.k = x.order();
  s.masks.assign(s.k, 0);
  std::vector<int64_t> dense(static_cast<size_t>(x.num_entries()), 0);
  x.for_each_one([&](int64_t linear) { dense[linear] = 1; });
  s.search(0, dense, 1);
  Rank1Pattern best;
  for (int axis = 0; axis < s.k; ++axis) {
    Fiber f(static_cast<size_t>(x.shape()[axis]), 0);
    for (size_t i = 0; i < f.size(); ++i) f[i] = s.best_masks[axis] >> i & 1;
    best.fibers.push_back(std::move(f));
  }
  return best;
}

FactorSet greedy_oracle_decompose(const BoolTensor& x, int max_rank) {
  FactorSet factors(x.shape());
  BoolTensor residual = x;
  int64_t error = x.count();
  while (factors.rank() < max_rank && !residual.none()) {
    Rank1Pattern p = brute_force_best_rank1(residual);
    FactorSet with = factors;
    with.append(p);
    const int64_t cost = reconstruction_error(x, with);
    if (cost >= error) break;
    error = cost;
    for_each_pattern_cell(p, residual.strides(),
                          [&](int64_t linear) { residual.reset(linear); });
    factors = std::move(with);
  }
  return factors;
}

double pattern_jaccard(const Rank1Pattern& a, const Rank1Pattern& b) {
  int64_t inter = 1;
  for (int axis = 0; axis < a.order(); ++axis) {
    int64_t common = 0;
    for (size_t i = 0; i < a.fibers[axis].size(); ++i) {
      common += a.fibers[axis][i] && b.fibers[axis][i];
    }
    inter *= common;
  }
  const int64_t size_a = a.size();
  const int64_t size_b = b.size();
  const int64_t uni = size_a + size_b - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// Hungarian algorithm (potentials form) minimizing cost on an n x n matrix.
// Returns assignment[row] = column.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

}  // namespace

RecoveryScore score_recovery(const FactorSet& recovered,
                             const FactorSet& planted) {
  if (recovered.shape() != planted.shape()) {
    throw Error(ErrorKind::kShape, "recovered and planted shapes differ");
  }
  RecoveryScore score;
  const int lr = recovered.rank();
  const int lp = planted.rank();
  score.rank_error = std::abs(lr - lp);
  const int n = std::max(lr, lp);
  if (n == 0) {
    score.mean_jaccard = 1.0;
    return score;
  }
  std::vector<std::vector<double>> weight(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < lr; ++i) {
    for (int j = 0; j < lp; ++j) {
      weight[i][j] = pattern_jaccard(recovered.pattern(i), planted.pattern(j));
    }
  }
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost[i][j] = -weight[i][j];
  }
  const std::vector<int> assignment = hungarian_min(cost);
  double total = 0.0;
  for (int i = 0; i < lr; ++i) {
    const int j = assignment[i];
    if (j >= 0 && j < lp) {
      score.matched_pairs.emplace_back(i, j);
      total += weight[i][j];
    }
  }
  score.mean_jaccard = std::clamp(total / n, 0.0, 1.0);
  return score;
}

int64_t net_coverage(const BoolTensor& x, const Rank1Pattern& pattern) {
  int64_t net = 0;
  for_each_pattern_cell(pattern, x.strides(), [&](int64_t linear) {
    net += x.test(linear) ? 1 : -1;
  });
  return net;
}

}  // namespace getf
