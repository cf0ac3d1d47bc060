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

// Left-triangular-like (LTL) geometry: marginal-sorting index reorderings,
// LTL property checkers, the segmenting-point rule and the simplex
// projection that locates the dense corner holding the largest pattern.
//
// The canonical form used by the engine puts the dense corner at index 1 of
// every mode, i.e. marginals are non-increasing along each mode.

#ifndef GETF_LTL_H_
#define GETF_LTL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "getf/bool_tensor.h"
#include "getf/tensor_ops.h"

namespace getf {

// One permutation per mode plus the inverses. perms[axis][i] is the original
// index placed at position i+1 of the reordered tensor.
struct IrtPlan {
  std::vector<Permutation> perms;
  std::vector<Permutation> inverse_perms;

  static IrtPlan identity(const std::vector<int64_t>& shape);
  static IrtPlan from_perms(std::vector<Permutation> perms);

  bool is_identity() const;
  // Maps a vector indexed in reordered coordinates back to original ones.
  Fiber to_original(int axis, const Fiber& reordered) const;
};

struct ReorderResult {
  BoolTensor tensor;
  IrtPlan plan;
};

enum class Orientation { kAscending, kDescending };

// The solid simplex {i : sum_j i_j / c_j <= 1 + band_width} anchored at the
// dense corner (1, ..., 1).
struct SimplexRegion {
  std::vector<double> intercepts;
  double band_width = 0.0;

  // 0-based per-axis coordinates.
  bool contains_axis_coords(std::span<const int64_t> axis_coords) const;
  bool contains(const IndexTuple& index) const;
};

struct ProjectionOptions {
  int grid = 8;            // intercept fractions 1/grid .. grid/grid of m_j
  double alpha = 1.0;      // penalty per zero inside the region
  int64_t lambda = 4;      // minimum region size in entries
  double band_width = 0.0;
  // Upper bound on bins * grid^(k-1) before marginal bins are coarsened.
  int64_t work_budget = int64_t{1} << 25;
};

// Sorts every mode by decreasing marginal (stable on original index).
ReorderResult ltl_reorder(const BoolTensor& x);

// True iff every p-order slice has monotone marginals along each of its
// unfixed modes in the given orientation. Throws Error{kParameter} unless
// 2 <= p <= k.
bool is_p_ltl(const BoolTensor& x, int p, Orientation orientation);

// Flatness of the 2-slice marginals: |s(j1) + s(j2) - 2 s((j1+j2)/2)| < eps
// for all pairs with an integral midpoint. Throws Error{kPrecondition} when x
// is not 2-LTL in the given orientation.
bool is_flat_2ltl(const BoolTensor& x, double epsilon,
                  Orientation orientation = Orientation::kDescending);

// ceil(m / k_rem): the anchor position counted from the dense corner.
int64_t segmenting_index(int64_t m, int k_rem);

// Scores every simplex on the intercept grid by (ones inside) - alpha *
// (zeros inside) and returns the best one (ties: smallest intercepts in
// lexicographic order). Expects x in canonical order. Throws
// Error{kEmptyTensor} on a zero tensor and Error{kNoRegion} when no
// candidate reaches lambda entries.
SimplexRegion two_ltl_projection(const BoolTensor& x,
                                 const ProjectionOptions& options = {});

// Entry-wise AND of x with the region indicator.
BoolTensor mask_to_region(const BoolTensor& x, const SimplexRegion& region);

}  // namespace getf

#endif  // GETF_LTL_H_
