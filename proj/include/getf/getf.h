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

// GETF: sequential rank-1 pattern extraction for Boolean CP decomposition.
//
// Each iteration reorders the residual into its dense-corner-first form,
// projects it onto the best-scoring corner simplex, locates a pattern fiber
// at the segmenting point of that region, and expands the fiber into a full
// rank-1 pattern by repeated geometric folding down to a 2-D base case. The
// best candidate over all folding directions is accepted while it improves
// the full reconstruction error by at least tau * |x|.

#ifndef GETF_GETF_H_
#define GETF_GETF_H_

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "getf/bool_tensor.h"
#include "getf/ltl.h"

namespace getf {

// A folding order: a permutation of the 1-based modes {1..k}.
struct Direction {
  std::vector<int> fold_order;
  bool operator==(const Direction&) const = default;
};

// Position of a pattern fiber. anchors has one 1-based entry per mode; the
// entry at free_mode is unused and left at 0.
struct FiberPosition {
  int free_mode = 1;
  std::vector<int64_t> anchors;
};

struct FoldResult {
  Fiber factor;        // the pattern fiber along the folded mode
  IntTensor overlap;   // H: inner product of the factor with every fiber
  BoolTensor folded;   // H thresholded at t * |factor|
};

enum class ConvergedReason { kTau, kMaxRank, kEmptyResidual, kNoRegion };
std::string_view converged_reason_name(ConvergedReason reason);

// What a candidate's cost is measured against.
enum class CostBasis {
  kFullTensor,  // |x XOR (accepted + candidate)|
  kResidual,    // |residual XOR candidate|, experimental
};

struct GetfConfig {
  double t = 0.7;        // noise tolerance used when thresholding folds
  double tau = 0.01;     // minimum error improvement per pattern, times |x|
  bool exha = false;     // all k! directions instead of k rotations
  int max_rank = 0;      // 0 selects min(20, sum of mode lengths)
  int64_t lambda = 4;    // minimum pattern / region size in entries
  double epsilon = 0.5;  // flatness tolerance for 2-LTL diagnostics
  uint64_t seed = 0;
  bool consensus_refinement = true;
  CostBasis cost_basis = CostBasis::kFullTensor;
  int threads = 0;       // 0 reads GETF_THREADS, else all cores
  ProjectionOptions projection;

  // Throws Error{kParameter} on out-of-range values.
  void validate() const;
  int effective_max_rank(const std::vector<int64_t>& shape) const;
};

struct DecompositionResult {
  FactorSet factors;
  std::vector<int64_t> error_trace;   // gamma after each accepted pattern
  std::vector<double> iteration_ms;   // every iteration run, incl. the last
  ConvergedReason converged_reason = ConvergedReason::kEmptyResidual;
  int64_t initial_error = 0;          // |x|

  double total_ms() const;
};

std::vector<Direction> direction_set(int k, bool exha);

// Fixes the non-free modes in ascending order: each step sorts the current
// slice's marginal along the mode being fixed and anchors at the
// segmenting index of its non-zero extent. Throws Error{kEmptyTensor} on a
// zero tensor.
FiberPosition pattern_fiber_finding(const BoolTensor& x, int free_mode);

// Densest non-zero fiber along free_mode (ties: lowest linear position).
FiberPosition densest_fiber_position(const BoolTensor& x, int free_mode);

// Folds x along pos.free_mode against the fiber at pos. Requires order >= 3.
// Throws Error{kDegenerateFiber} if that fiber is zero.
FoldResult fold_once(const BoolTensor& x, const FiberPosition& pos, double t);

// Expands one rank-1 pattern from the residual along the given direction.
// `region` lives in the coordinates of ltl_reorder(residual).
Rank1Pattern geometric_folding(const BoolTensor& residual,
                               const SimplexRegion& region,
                               const Direction& direction, double t);

// 2-D base case; returns (row vector, column vector).
std::pair<Fiber, Fiber> matrix_base_case(const BoolTensor& m, double t);

int64_t candidate_cost(const Rank1Pattern& candidate, const BoolTensor& x,
                       const FactorSet& accepted);

BoolTensor residual_clear(const BoolTensor& residual,
                          const Rank1Pattern& pattern);

// Optional post-step: every fiber bit is re-derived from the share of
// matching fibers (those inside the other modes' support) that carry it.
Rank1Pattern refine_by_consensus(const BoolTensor& residual,
                                 const Rank1Pattern& pattern, double t);

DecompositionResult getf_decompose(const BoolTensor& x,
                                   const GetfConfig& config = {});

}  // namespace getf

#endif  // GETF_GETF_H_
