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

#include "getf/tensor_ops.h"

#include <string>

#include "getf/error.h"

namespace getf {

BoolTensor from_coordinates(const std::vector<int64_t>& shape,
                            const std::vector<IndexTuple>& ones) {
  BoolTensor x(shape);
  for (const IndexTuple& index : ones) x.set(x.linear_index(index));
  return x;
}

BoolTensor elementwise(const BoolTensor& a, const BoolTensor& b, BoolOp op) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorKind::kShape, "elementwise operands differ in shape");
  }
  BoolTensor out(a.shape());
  auto dst = out.mutable_words();
  auto lhs = a.words();
  auto rhs = b.words();
  for (size_t w = 0; w < dst.size(); ++w) {
    switch (op) {
      case BoolOp::kSum: dst[w] = lhs[w] | rhs[w]; break;
      case BoolOp::kDiff: dst[w] = lhs[w] ^ rhs[w]; break;
      case BoolOp::kProduct: dst[w] = lhs[w] & rhs[w]; break;
    }
  }
  return out;
}

BoolTensor rank1_outer(const Rank1Pattern& pattern) {
  if (pattern.fibers.empty()) {
    throw Error(ErrorKind::kArity, "rank-1 pattern has no fibers");
  }
  BoolTensor out(pattern.shape());
  for_each_pattern_cell(pattern, out.strides(),
                        [&](int64_t linear) { out.set(linear); });
  return out;
}

BoolTensor reconstruct(const FactorSet& factors) {
  BoolTensor out(factors.shape());
  for (const Rank1Pattern& p : factors.patterns()) {
    for_each_pattern_cell(p, out.strides(),
                          [&](int64_t linear) { out.set(linear); });
  }
  return out;
}

int64_t reconstruction_error(const BoolTensor& x, const FactorSet& factors) {
  if (x.shape() != factors.shape()) {
    throw Error(ErrorKind::kShape, "tensor and factors differ in shape");
  }
  return elementwise(x, reconstruct(factors), BoolOp::kDiff).count();
}

IntTensor slice_sum(const BoolTensor& x, const ModeIndexSet& p) {
  const int k = x.order();
  if (p.modes.empty()) {
    throw Error(ErrorKind::kMode, "slice sum needs at least one mode");
  }
  std::vector<bool> summed(k, false);
  int previous = 0;
  for (int mode : p.modes) {
    if (mode < 1 || mode > k || mode <= previous) {
      throw Error(ErrorKind::kMode,
                  "invalid mode " + std::to_string(mode) +
                      " (modes must be strictly increasing within 1.." +
                      std::to_string(k) + ")");
    }
    summed[mode - 1] = true;
    previous = mode;
  }
  std::vector<int64_t> out_shape;
  std::vector<int> kept;
  for (int axis = 0; axis < k; ++axis) {
    if (!summed[axis]) {
      out_shape.push_back(x.shape()[axis]);
      kept.push_back(axis);
    }
  }
  IntTensor out(out_shape);
  std::vector<int64_t> coords(k);
  x.for_each_one([&](int64_t linear) {
    x.unravel(linear, coords);
    int64_t idx = 0;
    for (int axis : kept) idx = idx * x.shape()[axis] + coords[axis];
    out[idx] += 1;
  });
  return out;
}

Fiber mode_fiber(const BoolTensor& x, int mode,
                 std::span<const int64_t> anchors) {
  const int k = x.order();
  if (mode < 1 || mode > k) {
    throw Error(ErrorKind::kMode, "fiber mode " + std::to_string(mode) +
                                      " outside 1.." + std::to_string(k));
  }
  if (static_cast<int>(anchors.size()) != k) {
    throw Error(ErrorKind::kBounds, "fiber anchors have wrong arity");
  }
  int64_t base = 0;
  for (int axis = 0; axis < k; ++axis) {
    if (axis == mode - 1) continue;
    const int64_t c = anchors[axis];
    if (c < 1 || c > x.shape()[axis]) {
      throw Error(ErrorKind::kBounds,
                  "fiber anchor " + std::to_string(c) + " out of bounds on mode " +
                      std::to_string(axis + 1));
    }
    base += (c - 1) * x.stride(axis);
  }
  const int64_t m = x.shape()[mode - 1];
  const int64_t stride = x.stride(mode - 1);
  Fiber f(static_cast<size_t>(m));
  for (int64_t i = 0; i < m; ++i) f[i] = x.test(base + i * stride) ? 1 : 0;
  return f;
}

void check_permutation(const Permutation& perm, int64_t m) {
  if (static_cast<int64_t>(perm.size()) != m) {
    throw Error(ErrorKind::kPermutation,
                "permutation length " + std::to_string(perm.size()) +
                    " does not match mode length " + std::to_string(m));
  }
  std::vector<bool> seen(static_cast<size_t>(m), false);
  for (int64_t v : perm) {
    if (v < 1 || v > m || seen[v - 1]) {
      throw Error(ErrorKind::kPermutation,
                  "not a permutation of 1.." + std::to_string(m));
    }
    seen[v - 1] = true;
  }
}

Permutation invert_permutation(const Permutation& perm) {
  Permutation inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) {
    inv[perm[i] - 1] = static_cast<int64_t>(i) + 1;
  }
  return inv;
}

BoolTensor apply_irt(const BoolTensor& x,
                     const std::vector<Permutation>& perms) {
  const int k = x.order();
  if (static_cast<int>(perms.size()) != k) {
    throw Error(ErrorKind::kPermutation, "need one permutation per mode");
  }
  std::vector<Permutation> inverse(k);
  for (int axis = 0; axis < k; ++axis) {
    check_permutation(perms[axis], x.shape()[axis]);
    inverse[axis] = invert_permutation(perms[axis]);
  }
  BoolTensor out(x.shape());
  std::vector<int64_t> coords(k);
  x.for_each_one([&](int64_t linear) {
    x.unravel(linear, coords);
    int64_t target = 0;
    for (int axis = 0; axis < k; ++axis) {
      target += (inverse[axis][coords[axis]] - 1) * x.stride(axis);
    }
    out.set(target);
  });
  return out;
}

std::vector<std::vector<int64_t>> mode_marginals(const BoolTensor& x) {
  const int k = x.order();
  std::vector<std::vector<int64_t>> marginals(k);
  for (int axis = 0; axis < k; ++axis) {
    marginals[axis].assign(static_cast<size_t>(x.shape()[axis]), 0);
  }
  std::vector<int64_t> coords(k);
  x.for_each_one([&](int64_t linear) {
    x.unravel(linear, coords);
    for (int axis = 0; axis < k; ++axis) ++marginals[axis][coords[axis]];
  });
  return marginals;
}

}  // namespace getf
