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

#include "getf/ltl.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "getf/error.h"

namespace getf {

namespace {

// Slack for the simplex boundary test so that exact rational boundaries
// (e.g. i/c summing to exactly 1) are not lost to rounding.
constexpr double kBoundarySlack = 1e-9;

}  // namespace

IrtPlan IrtPlan::identity(const std::vector<int64_t>& shape) {
  std::vector<Permutation> perms;
  for (int64_t m : shape) {
    Permutation p(static_cast<size_t>(m));
    std::iota(p.begin(), p.end(), int64_t{1});
    perms.push_back(std::move(p));
  }
  return from_perms(std::move(perms));
}

IrtPlan IrtPlan::from_perms(std::vector<Permutation> perms) {
  IrtPlan plan;
  for (const Permutation& p : perms) {
    check_permutation(p, static_cast<int64_t>(p.size()));
    plan.inverse_perms.push_back(invert_permutation(p));
  }
  plan.perms = std::move(perms);
  return plan;
}

bool IrtPlan::is_identity() const {
  for (const Permutation& p : perms) {
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] != static_cast<int64_t>(i) + 1) return false;
    }
  }
  return true;
}

Fiber IrtPlan::to_original(int axis, const Fiber& reordered) const {
  const Permutation& p = perms[axis];
  Fiber out(reordered.size(), 0);
  for (size_t i = 0; i < reordered.size(); ++i) out[p[i] - 1] = reordered[i];
  return out;
}

bool SimplexRegion::contains_axis_coords(
    std::span<const int64_t> axis_coords) const {
  const double limit = 1.0 + band_width + kBoundarySlack;
  double s = 0.0;
  for (size_t axis = 0; axis < intercepts.size(); ++axis) {
    s += static_cast<double>(axis_coords[axis] + 1) / intercepts[axis];
    if (s > limit) return false;
  }
  return true;
}

bool SimplexRegion::contains(const IndexTuple& index) const {
  std::vector<int64_t> axis_coords(index.coords());
  for (int64_t& c : axis_coords) --c;
  return contains_axis_coords(axis_coords);
}

ReorderResult ltl_reorder(const BoolTensor& x) {
  const auto marginals = mode_marginals(x);
  std::vector<Permutation> perms;
  for (const auto& marginal : marginals) {
    Permutation order(marginal.size());
    std::iota(order.begin(), order.end(), int64_t{1});
    std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
      return marginal[a - 1] > marginal[b - 1];
    });
    perms.push_back(std::move(order));
  }
  IrtPlan plan = IrtPlan::from_perms(std::move(perms));
  BoolTensor reordered =
      plan.is_identity() ? x : apply_irt(x, plan.perms);
  return {std::move(reordered), std::move(plan)};
}

namespace {

// Visits every line of `t` along axis `axis`, passing the stride and start
// offset of the line.
template <typename Fn>
void for_each_line(const IntTensor& t, int axis, Fn&& fn) {
  const auto& shape = t.shape();
  int64_t inner = 1;
  for (size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  int64_t outer = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  const int64_t m = shape[axis];
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t i = 0; i < inner; ++i) fn(o * m * inner + i, inner, m);
  }
}

bool line_is_monotone(const IntTensor& t, int64_t start, int64_t stride,
                      int64_t m, Orientation orientation) {
  for (int64_t i = 1; i < m; ++i) {
    const int64_t prev = t[start + (i - 1) * stride];
    const int64_t cur = t[start + i * stride];
    if (orientation == Orientation::kAscending ? cur < prev : cur > prev) {
      return false;
    }
  }
  return true;
}

// All subsets of {1..k} of size p, as strictly increasing mode lists.
std::vector<std::vector<int>> mode_subsets(int k, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(current.size()) == p) {
      out.push_back(current);
      return;
    }
    for (int mode = next; mode <= k; ++mode) {
      current.push_back(mode);
      self(self, mode + 1);
      current.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

// For a slice set P and one of its modes j, sums over P \ {j} and returns
// the result together with the axis at which mode j sits in it.
std::pair<IntTensor, int> slice_marginal(const BoolTensor& x,
                                         const std::vector<int>& subset,
                                         int j) {
  ModeIndexSet summed;
  for (int mode : subset) {
    if (mode != j) summed.modes.push_back(mode);
  }
  IntTensor t = slice_sum(x, summed);
  int axis = 0;
  for (int mode = 1; mode < j; ++mode) {
    if (std::find(summed.modes.begin(), summed.modes.end(), mode) ==
        summed.modes.end()) {
      ++axis;
    }
  }
  return {std::move(t), axis};
}

}  // namespace

bool is_p_ltl(const BoolTensor& x, int p, Orientation orientation) {
  const int k = x.order();
  if (p < 2 || p > k) {
    throw Error(ErrorKind::kParameter, "slice order " + std::to_string(p) +
                                           " outside 2.." + std::to_string(k));
  }
  for (const auto& subset : mode_subsets(k, p)) {
    for (int j : subset) {
      auto [t, axis] = slice_marginal(x, subset, j);
      bool ok = true;
      for_each_line(t, axis, [&](int64_t start, int64_t stride, int64_t m) {
        if (ok && !line_is_monotone(t, start, stride, m, orientation)) {
          ok = false;
        }
      });
      if (!ok) return false;
    }
  }
  return true;
}

bool is_flat_2ltl(const BoolTensor& x, double epsilon,
                  Orientation orientation) {
  if (!is_p_ltl(x, 2, orientation)) {
    throw Error(ErrorKind::kPrecondition,
                "flatness is only defined for 2-LTL tensors");
  }
  for (const auto& subset : mode_subsets(x.order(), 2)) {
    for (int j : subset) {
      auto [t, axis] = slice_marginal(x, subset, j);
      bool ok = true;
      for_each_line(t, axis, [&](int64_t start, int64_t stride, int64_t m) {
        for (int64_t j1 = 0; ok && j1 < m; ++j1) {
          for (int64_t j2 = j1 + 2; j2 < m; j2 += 2) {
            const int64_t mid = (j1 + j2) / 2;
            const double second =
                static_cast<double>(t[start + j1 * stride] +
                                    t[start + j2 * stride] -
                                    2 * t[start + mid * stride]);
            if (!(std::abs(second) < epsilon)) {
              ok = false;
              break;
            }
          }
        }
      });
      if (!ok) return false;
    }
  }
  return true;
}

int64_t segmenting_index(int64_t m, int k_rem) {
  if (k_rem < 2) {
    throw Error(ErrorKind::kParameter,
                "remaining order must be at least 2, got " +
                    std::to_string(k_rem));
  }
  if (m < 1) {
    throw Error(ErrorKind::kParameter, "mode length must be positive");
  }
  return (m + k_rem - 1) / k_rem;
}

namespace {

// Per-axis binning of indices for region scoring. With exact bins every
// index is its own bin and the representative is the index itself.
struct AxisBins {
  std::vector<int64_t> bin_of;          // 0-based index -> bin
  std::vector<double> representative;   // 1-based coordinate of each bin
  std::vector<int64_t> width;           // indices per bin
};

AxisBins make_bins(int64_t m, int64_t bins) {
  AxisBins out;
  out.bin_of.resize(static_cast<size_t>(m));
  out.representative.assign(static_cast<size_t>(bins), 0.0);
  out.width.assign(static_cast<size_t>(bins), 0);
  std::vector<int64_t> lo(static_cast<size_t>(bins),
                          std::numeric_limits<int64_t>::max());
  std::vector<int64_t> hi(static_cast<size_t>(bins), -1);
  for (int64_t i = 0; i < m; ++i) {
    const int64_t b = i * bins / m;
    out.bin_of[i] = b;
    ++out.width[b];
    lo[b] = std::min(lo[b], i);
    hi[b] = std::max(hi[b], i);
  }
  for (int64_t b = 0; b < bins; ++b) {
    out.representative[b] = bins == m ? static_cast<double>(b + 1)
                                      : 0.5 * static_cast<double>(lo[b] + hi[b]) + 1.0;
  }
  return out;
}

struct ProjectionContext {
  int k = 0;
  int grid = 0;
  double limit = 0.0;
  const std::vector<std::vector<double>>* intercepts = nullptr;  // [axis][g-1]
  const std::vector<AxisBins>* bins = nullptr;
  std::vector<int64_t> bin_coords;
  int64_t bin_ones = 0;
  int64_t bin_volume = 0;
  std::vector<int64_t>* ones_diff = nullptr;
  std::vector<int64_t>* volume_diff = nullptr;

  double rep(int axis) const {
    return (*bins)[axis].representative[bin_coords[axis]];
  }
  double term(int axis, int g) const {
    return rep(axis) / (*intercepts)[axis][g - 1];
  }

  // Axes 1..k-2 enumerate g from the largest (smallest term) downwards; the
  // last axis resolves the smallest admissible g directly.
  void visit(int axis, double partial, int64_t prefix) {
    if (axis == k - 1) {
      auto inside = [&](int g) { return partial + term(axis, g) <= limit; };
      if (!inside(grid)) return;
      int g_min = grid;
      while (g_min > 1 && inside(g_min - 1)) --g_min;
      const int64_t base = prefix * (grid + 1);
      (*ones_diff)[base + g_min - 1] += bin_ones;
      (*ones_diff)[base + grid] -= bin_ones;
      (*volume_diff)[base + g_min - 1] += bin_volume;
      (*volume_diff)[base + grid] -= bin_volume;
      return;
    }
    for (int g = grid; g >= 1; --g) {
      const double s = partial + term(axis, g);
      if (s > limit) break;
      visit(axis + 1, s, prefix * grid + (g - 1));
    }
  }
};

}  // namespace

SimplexRegion two_ltl_projection(const BoolTensor& x,
                                 const ProjectionOptions& options) {
  if (x.none()) {
    throw Error(ErrorKind::kEmptyTensor, "projection of a zero tensor");
  }
  if (options.grid < 1) {
    throw Error(ErrorKind::kParameter, "projection grid must be positive");
  }
  const int k = x.order();
  const int grid = options.grid;
  const auto& shape = x.shape();

  std::vector<std::vector<double>> intercepts(k);
  for (int axis = 0; axis < k; ++axis) {
    for (int g = 1; g <= grid; ++g) {
      intercepts[axis].push_back(static_cast<double>(g) *
                                 static_cast<double>(shape[axis]) / grid);
    }
  }

  // Choose bin resolution: exact when affordable, otherwise a uniform cap.
  double per_bin = 1.0;
  for (int i = 0; i < k - 1; ++i) per_bin *= grid;
  const double bin_budget =
      std::max(1.0, static_cast<double>(options.work_budget) / per_bin);
  std::vector<int64_t> bins_per_axis(shape.begin(), shape.end());
  if (static_cast<double>(x.num_entries()) > bin_budget) {
    const auto cap = static_cast<int64_t>(
        std::max(1.0, std::floor(std::pow(bin_budget, 1.0 / k) + 1e-9)));
    for (int axis = 0; axis < k; ++axis) {
      bins_per_axis[axis] = std::min(shape[axis], cap);
    }
  }
  std::vector<AxisBins> bins;
  for (int axis = 0; axis < k; ++axis) {
    bins.push_back(make_bins(shape[axis], bins_per_axis[axis]));
  }
  int64_t total_bins = 1;
  for (int64_t b : bins_per_axis) total_bins *= b;

  std::vector<int64_t> ones_hist(static_cast<size_t>(total_bins), 0);
  {
    std::vector<int64_t> coords(k);
    x.for_each_one([&](int64_t linear) {
      x.unravel(linear, coords);
      int64_t b = 0;
      for (int axis = 0; axis < k; ++axis) {
        b = b * bins_per_axis[axis] + bins[axis].bin_of[coords[axis]];
      }
      ++ones_hist[b];
    });
  }

  int64_t prefixes = 1;
  for (int i = 0; i < k - 2; ++i) prefixes *= grid;

  ProjectionContext ctx;
  ctx.k = k;
  ctx.grid = grid;
  ctx.limit = 1.0 + options.band_width + kBoundarySlack;
  ctx.intercepts = &intercepts;
  ctx.bins = &bins;
  ctx.bin_coords.assign(k, 0);

  bool found = false;
  double best_score = 0.0;
  std::vector<int> best_g(k, 0);
  std::vector<int64_t> ones_diff;
  std::vector<int64_t> volume_diff;
  ctx.ones_diff = &ones_diff;
  ctx.volume_diff = &volume_diff;

  for (int g1 = 1; g1 <= grid; ++g1) {
    ones_diff.assign(static_cast<size_t>(prefixes * (grid + 1)), 0);
    volume_diff.assign(static_cast<size_t>(prefixes * (grid + 1)), 0);
    std::fill(ctx.bin_coords.begin(), ctx.bin_coords.end(), 0);
    for (int64_t b = 0; b < total_bins; ++b) {
      ctx.bin_ones = ones_hist[b];
      ctx.bin_volume = 1;
      for (int axis = 0; axis < k; ++axis) {
        ctx.bin_volume *= bins[axis].width[ctx.bin_coords[axis]];
      }
      const double s = ctx.term(0, g1);
      if (s <= ctx.limit) ctx.visit(1, s, 0);
      for (int axis = k - 1; axis >= 0; --axis) {
        if (++ctx.bin_coords[axis] < bins_per_axis[axis]) break;
        ctx.bin_coords[axis] = 0;
      }
    }
    for (int64_t prefix = 0; prefix < prefixes; ++prefix) {
      int64_t ones = 0;
      int64_t volume = 0;
      for (int g = 1; g <= grid; ++g) {
        ones += ones_diff[prefix * (grid + 1) + g - 1];
        volume += volume_diff[prefix * (grid + 1) + g - 1];
        if (volume < options.lambda) continue;
        const double score =
            static_cast<double>(ones) -
            options.alpha * static_cast<double>(volume - ones);
        if (!found || score > best_score) {
          found = true;
          best_score = score;
          best_g[0] = g1;
          int64_t rest = prefix;
          for (int axis = k - 2; axis >= 1; --axis) {
            best_g[axis] = static_cast<int>(rest % grid) + 1;
            rest /= grid;
          }
          best_g[k - 1] = g;
        }
      }
    }
  }
  if (!found) {
    throw Error(ErrorKind::kNoRegion, "no candidate region reaches lambda = " +
                                          std::to_string(options.lambda) +
                                          " entries");
  }
  SimplexRegion region;
  region.band_width = options.band_width;
  for (int axis = 0; axis < k; ++axis) {
    region.intercepts.push_back(intercepts[axis][best_g[axis] - 1]);
  }
  return region;
}

BoolTensor mask_to_region(const BoolTensor& x, const SimplexRegion& region) {
  if (static_cast<int>(region.intercepts.size()) != x.order()) {
    throw Error(ErrorKind::kShape, "region order does not match tensor order");
  }
  BoolTensor out(x.shape());
  std::vector<int64_t> coords(x.order());
  x.for_each_one([&](int64_t linear) {
    x.unravel(linear, coords);
    if (region.contains_axis_coords(coords)) out.set(linear);
  });
  return out;
}

}  // namespace getf
