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

// Boolean algebra, slicing and reconstruction primitives over BoolTensor.

#ifndef GETF_TENSOR_OPS_H_
#define GETF_TENSOR_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "getf/bool_tensor.h"

namespace getf {

// A 1-based permutation of {1..m}: entry i (0-based slot) holds the source
// index that lands at position i+1.
using Permutation = std::vector<int64_t>;

// Strictly increasing subset of the modes {1..k}.
struct ModeIndexSet {
  std::vector<int> modes;
};

enum class BoolOp {
  kSum,      // OR
  kDiff,     // XOR
  kProduct,  // AND
};

BoolTensor from_coordinates(const std::vector<int64_t>& shape,
                            const std::vector<IndexTuple>& ones);

BoolTensor elementwise(const BoolTensor& a, const BoolTensor& b, BoolOp op);

BoolTensor rank1_outer(const Rank1Pattern& pattern);

BoolTensor reconstruct(const FactorSet& factors);

// |x XOR reconstruct(factors)|, the L1 reconstruction cost.
int64_t reconstruction_error(const BoolTensor& x, const FactorSet& factors);

// Sums x over the modes in p. The result has order k - |p|; summing every
// mode yields an order-0 scalar equal to |x|.
IntTensor slice_sum(const BoolTensor& x, const ModeIndexSet& p);

// Reads x along `mode` with the other coordinates taken from `anchors`
// (length k, 1-based; the entry at the free mode is ignored).
Fiber mode_fiber(const BoolTensor& x, int mode,
                 std::span<const int64_t> anchors);

// out(i_1..i_k) = x(perm_1(i_1), ..., perm_k(i_k)).
BoolTensor apply_irt(const BoolTensor& x, const std::vector<Permutation>& perms);

// Validates a permutation of {1..m}; throws Error{kPermutation}.
void check_permutation(const Permutation& perm, int64_t m);
Permutation invert_permutation(const Permutation& perm);

// For every axis, the vector of counts obtained by summing over all other
// axes (the per-mode marginals). One pass over the set bits.
std::vector<std::vector<int64_t>> mode_marginals(const BoolTensor& x);

// Calls fn(linear) for every entry covered by the outer product of pattern,
// where linear addresses a tensor with the given strides.
template <typename Fn>
void for_each_pattern_cell(const Rank1Pattern& pattern,
                           const std::vector<int64_t>& strides, Fn&& fn) {
  const int k = pattern.order();
  std::vector<std::vector<int64_t>> support(k);
  for (int axis = 0; axis < k; ++axis) {
    const Fiber& f = pattern.fibers[axis];
    for (int64_t i = 0; i < static_cast<int64_t>(f.size()); ++i) {
      if (f[i]) support[axis].push_back(i * strides[axis]);
    }
    if (support[axis].empty()) return;
  }
  std::vector<size_t> pos(k, 0);
  std::vector<int64_t> partial(k + 1, 0);
  for (int axis = 0; axis < k; ++axis) {
    partial[axis + 1] = partial[axis] + support[axis][0];
  }
  while (true) {
    fn(partial[k]);
    int axis = k - 1;
    while (axis >= 0) {
      if (++pos[axis] < support[axis].size()) break;
      pos[axis] = 0;
      --axis;
    }
    if (axis < 0) return;
    for (int a = axis; a < k; ++a) {
      partial[a + 1] = partial[a] + support[a][pos[a]];
    }
  }
}

}  // namespace getf

#endif  // GETF_TENSOR_OPS_H_
