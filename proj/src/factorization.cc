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

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

#include "getf/error.h"
#include "getf/getf.h"
#include "getf/tensor_ops.h"

namespace getf {

std::string_view converged_reason_name(ConvergedReason reason) {
  switch (reason) {
    case ConvergedReason::kTau: return "tau";
    case ConvergedReason::kMaxRank: return "max_rank";
    case ConvergedReason::kEmptyResidual: return "empty_residual";
    case ConvergedReason::kNoRegion: return "no_region";
  }
  return "unknown";
}

void GetfConfig::validate() const {
  if (!(t > 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::kParameter, "t must lie in (0, 1]");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorKind::kParameter, "tau must lie in [0, 1]");
  }
  if (max_rank < 0) {
    throw Error(ErrorKind::kParameter, "max_rank must be >= 1 (0 = default)");
  }
  if (lambda < 1) throw Error(ErrorKind::kParameter, "lambda must be >= 1");
  if (!(epsilon >= 0.0)) {
    throw Error(ErrorKind::kParameter, "epsilon must be non-negative");
  }
  if (threads < 0) throw Error(ErrorKind::kParameter, "threads must be >= 0");
  if (projection.grid < 1 || !(projection.alpha >= 0.0) ||
      !(projection.band_width >= 0.0)) {
    throw Error(ErrorKind::kParameter, "invalid projection options");
  }
}

int GetfConfig::effective_max_rank(const std::vector<int64_t>& shape) const {
  if (max_rank > 0) return max_rank;
  const int64_t total = std::accumulate(shape.begin(), shape.end(), int64_t{0});
  return static_cast<int>(std::min<int64_t>(20, total));
}

double DecompositionResult::total_ms() const {
  return std::accumulate(iteration_ms.begin(), iteration_ms.end(), 0.0);
}

std::vector<Direction> direction_set(int k, bool exha) {
  if (k < 2) {
    throw Error(ErrorKind::kParameter, "direction set needs order >= 2");
  }
  std::vector<int> base(k);
  std::iota(base.begin(), base.end(), 1);
  std::vector<Direction> out;
  if (exha) {
    do {
      out.push_back({base});
    } while (std::next_permutation(base.begin(), base.end()));
  } else {
    for (int r = 0; r < k; ++r) {
      Direction d;
      for (int i = 0; i < k; ++i) d.fold_order.push_back(base[(r + i) % k]);
      out.push_back(std::move(d));
    }
  }
  return out;
}

namespace {

void check_free_mode(const BoolTensor& x, int free_mode) {
  if (free_mode < 1 || free_mode > x.order()) {
    throw Error(ErrorKind::kMode, "free mode " + std::to_string(free_mode) +
                                      " outside 1.." +
                                      std::to_string(x.order()));
  }
}

int64_t axis_coord(const BoolTensor& x, int64_t linear, int axis) {
  return (linear / x.stride(axis)) % x.shape()[axis];
}

}  // namespace

FiberPosition pattern_fiber_finding(const BoolTensor& x, int free_mode) {
  check_free_mode(x, free_mode);
  std::vector<int64_t> ones = x.ones_linear();
  if (ones.empty()) {
    throw Error(ErrorKind::kEmptyTensor, "pattern fiber search on zero tensor");
  }
  const int k = x.order();
  FiberPosition pos;
  pos.free_mode = free_mode;
  pos.anchors.assign(k, 0);
  int step = 0;
  for (int axis = 0; axis < k; ++axis) {
    if (axis == free_mode - 1) continue;
    const int k_rem = k - step;
    ++step;
    const int64_t m = x.shape()[axis];
    std::vector<int64_t> marginal(static_cast<size_t>(m), 0);
    for (int64_t linear : ones) ++marginal[axis_coord(x, linear, axis)];
    std::vector<int64_t> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), int64_t{0});
    std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
      return marginal[a] > marginal[b];
    });
    const auto extent = std::count_if(marginal.begin(), marginal.end(),
                                      [](int64_t c) { return c > 0; });
    const int64_t anchor = order[segmenting_index(extent, k_rem) - 1];
    pos.anchors[axis] = anchor + 1;
    std::erase_if(ones, [&](int64_t linear) {
      return axis_coord(x, linear, axis) != anchor;
    });
  }
  if (ones.empty()) {
    throw Error(ErrorKind::kDegenerateFiber, "anchored fiber is zero");
  }
  return pos;
}

FiberPosition densest_fiber_position(const BoolTensor& x, int free_mode) {
  check_free_mode(x, free_mode);
  const int axis = free_mode - 1;
  const int64_t stride = x.stride(axis);
  const int64_t m = x.shape()[axis];
  // Fibers are keyed by their linear offset with the free coordinate zeroed.
  std::vector<int64_t> counts(static_cast<size_t>(x.num_entries() / m), 0);
  auto key = [&](int64_t linear) {
    return (linear / (stride * m)) * stride + linear % stride;
  };
  x.for_each_one([&](int64_t linear) { ++counts[key(linear)]; });
  const auto best = std::max_element(counts.begin(), counts.end());
  if (best == counts.end() || *best == 0) {
    throw Error(ErrorKind::kEmptyTensor, "no non-zero fiber");
  }
  const int64_t rest = best - counts.begin();
  const int64_t base = (rest / stride) * stride * m + rest % stride;
  FiberPosition pos;
  pos.free_mode = free_mode;
  pos.anchors.assign(x.order(), 0);
  for (int a = 0; a < x.order(); ++a) {
    if (a != axis) pos.anchors[a] = axis_coord(x, base, a) + 1;
  }
  return pos;
}

FoldResult fold_once(const BoolTensor& x, const FiberPosition& pos, double t) {
  const int k = x.order();
  if (k < 3) {
    throw Error(ErrorKind::kParameter, "folding needs a tensor of order >= 3");
  }
  check_free_mode(x, pos.free_mode);
  const int axis = pos.free_mode - 1;
  Fiber factor = mode_fiber(x, pos.free_mode, pos.anchors);
  const int64_t weight = fiber_count(factor);
  if (weight == 0) {
    throw Error(ErrorKind::kDegenerateFiber, "pattern fiber is zero");
  }
  std::vector<int64_t> rest_shape;
  for (int a = 0; a < k; ++a) {
    if (a != axis) rest_shape.push_back(x.shape()[a]);
  }
  IntTensor overlap(rest_shape);
  const int64_t stride = x.stride(axis);
  const int64_t m = x.shape()[axis];
  x.for_each_one([&](int64_t linear) {
    const int64_t i = (linear / stride) % m;
    if (factor[i]) overlap[(linear / (stride * m)) * stride + linear % stride] += 1;
  });
  BoolTensor folded(rest_shape);
  const double threshold = t * static_cast<double>(weight);
  for (int64_t r = 0; r < overlap.num_entries(); ++r) {
    if (overlap[r] > 0 && static_cast<double>(overlap[r]) >= threshold) {
      folded.set(r);
    }
  }
  return {std::move(factor), std::move(overlap), std::move(folded)};
}

namespace {

// The seed line is located on `search` (the matrix itself, or its masked
// dense corner) and read from `m`; the partner vector grows from it by
// thresholded overlap. Both orientations are tried.
std::pair<Fiber, Fiber> base_case(const BoolTensor& m, const BoolTensor& search,
                                  double t) {
  if (m.order() != 2) {
    throw Error(ErrorKind::kShape, "matrix base case needs an order-2 tensor");
  }
  const int64_t rows = m.shape()[0];
  const int64_t cols = m.shape()[1];
  Fiber row_out(static_cast<size_t>(rows), 0);
  Fiber col_out(static_cast<size_t>(cols), 0);
  if (m.none()) return {row_out, col_out};
  const BoolTensor& seed_source = search.none() ? m : search;
  const std::vector<int64_t> ones = m.ones_linear();

  // seed_axis 0: the seed is a column (a mode-1 fiber); 1: a row.
  auto grow = [&](int seed_axis) {
    const int other = 1 - seed_axis;
    FiberPosition pos;
    try {
      pos = pattern_fiber_finding(seed_source, seed_axis + 1);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerateFiber) throw;
      pos = densest_fiber_position(seed_source, seed_axis + 1);
    }
    Fiber seed = mode_fiber(m, seed_axis + 1, pos.anchors);
    Fiber partner(static_cast<size_t>(m.shape()[other]), 0);
    const int64_t weight = fiber_count(seed);
    std::vector<int64_t> overlap(partner.size(), 0);
    for (int64_t linear : ones) {
      const int64_t c[2] = {linear / cols, linear % cols};
      if (seed[c[seed_axis]]) ++overlap[c[other]];
    }
    const double threshold = t * static_cast<double>(weight);
    for (size_t j = 0; j < partner.size(); ++j) {
      partner[j] = overlap[j] > 0 && static_cast<double>(overlap[j]) >= threshold;
    }
    // Score: covered ones minus covered zeros.
    int64_t covered = 0;
    for (int64_t linear : ones) {
      const int64_t c[2] = {linear / cols, linear % cols};
      if (seed[c[seed_axis]] && partner[c[other]]) ++covered;
    }
    const int64_t score = 2 * covered - weight * fiber_count(partner);
    return seed_axis == 0 ? std::make_tuple(score, seed, partner)
                          : std::make_tuple(score, partner, seed);
  };

  auto [col_score, col_rows, col_cols] = grow(0);
  auto [row_score, row_rows, row_cols] = grow(1);
  if (row_score > col_score) return {row_rows, row_cols};
  return {col_rows, col_cols};
}

}  // namespace

std::pair<Fiber, Fiber> matrix_base_case(const BoolTensor& m, double t) {
  return base_case(m, m, t);
}

namespace {

// Folds a tensor already in canonical order down to a rank-1 pattern whose
// fibers are expressed in that canonical order.
Rank1Pattern fold_canonical(const BoolTensor& canonical,
                            const SimplexRegion* region,
                            const Direction& direction, double t) {
  const int k = canonical.order();
  if (canonical.none()) return Rank1Pattern::empty_for(canonical.shape());
  if (static_cast<int>(direction.fold_order.size()) != k) {
    throw Error(ErrorKind::kParameter, "direction does not match tensor order");
  }
  Rank1Pattern pattern;
  pattern.fibers.resize(k);
  // to_canonical[mode-1][i]: canonical index of position i in `current`.
  std::vector<std::vector<int64_t>> to_canonical(k);
  for (int a = 0; a < k; ++a) {
    to_canonical[a].resize(static_cast<size_t>(canonical.shape()[a]));
    std::iota(to_canonical[a].begin(), to_canonical[a].end(), int64_t{0});
  }
  auto map_back = [&](int mode, const Fiber& v) {
    Fiber out(v.size(), 0);
    for (size_t i = 0; i < v.size(); ++i) out[to_canonical[mode - 1][i]] = v[i];
    return out;
  };

  std::optional<BoolTensor> current;
  std::vector<int> modes(k);
  std::iota(modes.begin(), modes.end(), 1);
  const BoolTensor* tensor = &canonical;
  for (int round = 0; round < k - 2; ++round) {
    if (round > 0) {
      auto [reordered, plan] = ltl_reorder(*tensor);
      for (size_t a = 0; a < modes.size(); ++a) {
        auto& map = to_canonical[modes[a] - 1];
        std::vector<int64_t> next(map.size());
        for (size_t i = 0; i < map.size(); ++i) {
          next[i] = map[plan.perms[a][i] - 1];
        }
        map = std::move(next);
      }
      current = std::move(reordered);
      tensor = &*current;
    }
    const int mode = direction.fold_order[round];
    const int axis = static_cast<int>(
        std::find(modes.begin(), modes.end(), mode) - modes.begin());
    std::optional<BoolTensor> masked;
    if (round == 0 && region != nullptr) {
      masked = mask_to_region(*tensor, *region);
      if (masked->none()) masked.reset();
    }
    const BoolTensor& search = masked ? *masked : *tensor;
    FiberPosition pos;
    try {
      pos = pattern_fiber_finding(search, axis + 1);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerateFiber) throw;
      pos = densest_fiber_position(search, axis + 1);
    }
    FoldResult fold = fold_once(*tensor, pos, t);
    pattern.fibers[mode - 1] = map_back(mode, fold.factor);
    modes.erase(modes.begin() + axis);
    current = std::move(fold.folded);
    tensor = &*current;
    if (tensor->none()) return Rank1Pattern::empty_for(canonical.shape());
  }
  std::optional<BoolTensor> masked;
  if (k == 2 && region != nullptr) masked = mask_to_region(*tensor, *region);
  auto [u, v] = base_case(*tensor, masked ? *masked : *tensor, t);
  pattern.fibers[modes[0] - 1] = map_back(modes[0], u);
  pattern.fibers[modes[1] - 1] = map_back(modes[1], v);
  if (pattern.empty()) return Rank1Pattern::empty_for(canonical.shape());
  return pattern;
}

Rank1Pattern to_original(const Rank1Pattern& p, const IrtPlan& plan) {
  Rank1Pattern out;
  for (int a = 0; a < p.order(); ++a) {
    out.fibers.push_back(plan.to_original(a, p.fibers[a]));
  }
  return out;
}

// Tracks the current reconstruction so a candidate's full-tensor error can
// be evaluated by visiting only the candidate's own cells.
class CostTracker {
 public:
  explicit CostTracker(const BoolTensor& x)
      : x_(x), recon_(x.shape()), error_(x.count()) {}

  int64_t error() const { return error_; }

  int64_t cost(const Rank1Pattern& p) const {
    int64_t cost = error_;
    for_each_pattern_cell(p, x_.strides(), [&](int64_t linear) {
      if (!recon_.test(linear)) cost += x_.test(linear) ? -1 : 1;
    });
    return cost;
  }

  void accept(const Rank1Pattern& p) {
    error_ = cost(p);
    for_each_pattern_cell(p, x_.strides(),
                          [&](int64_t linear) { recon_.set(linear); });
  }

 private:
  const BoolTensor& x_;
  BoolTensor recon_;
  int64_t error_;
};

int64_t residual_cost(const BoolTensor& residual, int64_t residual_count,
                      const Rank1Pattern& p) {
  int64_t cost = residual_count;
  for_each_pattern_cell(p, residual.strides(), [&](int64_t linear) {
    cost += residual.test(linear) ? -1 : 1;
  });
  return cost;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GETF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

Rank1Pattern geometric_folding(const BoolTensor& residual,
                               const SimplexRegion& region,
                               const Direction& direction, double t) {
  if (residual.none()) return Rank1Pattern::empty_for(residual.shape());
  auto [canonical, plan] = ltl_reorder(residual);
  return to_original(fold_canonical(canonical, &region, direction, t), plan);
}

int64_t candidate_cost(const Rank1Pattern& candidate, const BoolTensor& x,
                       const FactorSet& accepted) {
  FactorSet with = accepted;
  with.append(candidate);
  return reconstruction_error(x, with);
}

BoolTensor residual_clear(const BoolTensor& residual,
                          const Rank1Pattern& pattern) {
  if (pattern.shape() != residual.shape()) {
    throw Error(ErrorKind::kShape, "pattern and residual differ in shape");
  }
  BoolTensor out = residual;
  for_each_pattern_cell(pattern, out.strides(),
                        [&](int64_t linear) { out.reset(linear); });
  return out;
}

Rank1Pattern refine_by_consensus(const BoolTensor& residual,
                                 const Rank1Pattern& pattern, double t) {
  if (pattern.empty()) return pattern;
  Rank1Pattern refined = pattern;
  const int k = pattern.order();
  for (int axis = 0; axis < k; ++axis) {
    Rank1Pattern others = refined;
    Fiber& free = others.fibers[axis];
    std::fill(free.begin(), free.end(), 1);
    int64_t matching = 1;
    for (int a = 0; a < k; ++a) {
      if (a != axis) matching *= fiber_count(refined.fibers[a]);
    }
    std::vector<int64_t> votes(free.size(), 0);
    for_each_pattern_cell(others, residual.strides(), [&](int64_t linear) {
      if (residual.test(linear)) ++votes[axis_coord(residual, linear, axis)];
    });
    Fiber next(free.size(), 0);
    for (size_t i = 0; i < next.size(); ++i) {
      next[i] = votes[i] > 0 &&
                static_cast<double>(votes[i]) >= t * static_cast<double>(matching);
    }
    if (fiber_is_zero(next)) break;
    refined.fibers[axis] = std::move(next);
  }
  return refined;
}

DecompositionResult getf_decompose(const BoolTensor& x,
                                   const GetfConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const int k = x.order();
  const int max_rank = config.effective_max_rank(x.shape());
  const std::vector<Direction> directions = direction_set(k, config.exha);
  const int threads = resolve_threads(config.threads);
  ProjectionOptions projection = config.projection;
  projection.lambda = config.lambda;

  DecompositionResult result{FactorSet(x.shape()), {}, {},
                             ConvergedReason::kEmptyResidual, x.count()};
  const double min_gain = config.tau * static_cast<double>(result.initial_error);
  BoolTensor residual = x;
  CostTracker tracker(x);

  while (true) {
    if (result.factors.rank() >= max_rank) {
      result.converged_reason = ConvergedReason::kMaxRank;
      break;
    }
    if (residual.none()) {
      result.converged_reason = ConvergedReason::kEmptyResidual;
      break;
    }
    const auto start = Clock::now();
    auto elapsed_ms = [&] {
      return std::chrono::duration<double, std::milli>(Clock::now() - start)
          .count();
    };

    auto [canonical, plan] = ltl_reorder(residual);
    SimplexRegion region;
    try {
      region = two_ltl_projection(canonical, projection);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNoRegion) throw;
      result.converged_reason = ConvergedReason::kNoRegion;
      result.iteration_ms.push_back(elapsed_ms());
      break;
    }

    const int64_t residual_count = residual.count();
    std::vector<Rank1Pattern> candidates(directions.size());
    std::vector<int64_t> costs(directions.size());
    parallel_for(static_cast<int>(directions.size()), threads, [&](int d) {
      auto cost_of = [&](const Rank1Pattern& p) {
        return config.cost_basis == CostBasis::kFullTensor
                   ? tracker.cost(p)
                   : residual_cost(residual, residual_count, p);
      };
      Rank1Pattern p = to_original(
          fold_canonical(canonical, &region, directions[d], config.t), plan);
      costs[d] = cost_of(p);
      // The refined pattern replaces the raw fold only if it is no worse.
      if (config.consensus_refinement && !p.empty()) {
        Rank1Pattern refined = refine_by_consensus(residual, p, config.t);
        const int64_t refined_cost = cost_of(refined);
        if (refined_cost <= costs[d]) {
          costs[d] = refined_cost;
          p = std::move(refined);
        }
      }
      candidates[d] = std::move(p);
    });
    size_t best = 0;
    for (size_t d = 1; d < candidates.size(); ++d) {
      if (costs[d] < costs[best]) best = d;
    }
    const Rank1Pattern& chosen = candidates[best];
    const int64_t baseline = config.cost_basis == CostBasis::kFullTensor
                                 ? tracker.error()
                                 : residual_count;
    const int64_t gain = baseline - costs[best];
    const bool accept = !chosen.empty() && chosen.size() >= config.lambda &&
                        gain > 0 && static_cast<double>(gain) >= min_gain;
    if (!accept) {
      result.converged_reason = ConvergedReason::kTau;
      result.iteration_ms.push_back(elapsed_ms());
      break;
    }
    tracker.accept(chosen);
    for_each_pattern_cell(chosen, residual.strides(),
                          [&](int64_t linear) { residual.reset(linear); });
    result.factors.append(chosen);
    result.error_trace.push_back(tracker.error());
    result.iteration_ms.push_back(elapsed_ms());
  }
  return result;
}

}  // namespace getf
