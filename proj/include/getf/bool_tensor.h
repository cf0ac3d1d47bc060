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

// Core value types: dense bit-packed Boolean tensors, integer count tensors,
// rank-1 patterns and factor sets.
//
// Index conventions used throughout the library:
//   * a "mode" is 1-based (1..k), as are the coordinates held by IndexTuple
//     and the entries of permutations;
//   * an "axis" is the 0-based position of a mode in a shape vector, and
//     "linear" indices address the row-major (last axis fastest) storage.

#ifndef GETF_BOOL_TENSOR_H_
#define GETF_BOOL_TENSOR_H_

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace getf {

// A binary vector stored one value per byte (0 or 1). Used for fibers and
// factor columns, which are short compared to the tensors they index.
using Fiber = std::vector<std::uint8_t>;

int64_t fiber_count(const Fiber& fiber);
bool fiber_is_zero(const Fiber& fiber);

// Coordinates of one tensor entry, 1-based.
class IndexTuple {
 public:
  IndexTuple() = default;
  IndexTuple(std::initializer_list<int64_t> coords) : coords_(coords) {}
  explicit IndexTuple(std::vector<int64_t> coords)
      : coords_(std::move(coords)) {}

  int order() const { return static_cast<int>(coords_.size()); }
  int64_t operator[](int axis) const { return coords_[axis]; }
  const std::vector<int64_t>& coords() const { return coords_; }
  std::string to_string() const;

  bool operator==(const IndexTuple&) const = default;

 private:
  std::vector<int64_t> coords_;
};

// Validates a tensor shape (order 2..8, positive lengths, addressable entry
// count) and returns the entry count. Throws Error{kShape}.
int64_t checked_entry_count(const std::vector<int64_t>& shape);

class BoolTensor {
 public:
  static constexpr int kMinOrder = 2;
  static constexpr int kMaxOrder = 8;

  // Zero tensor of the given shape.
  explicit BoolTensor(std::vector<int64_t> shape);

  static BoolTensor ones(std::vector<int64_t> shape);

  const std::vector<int64_t>& shape() const { return shape_; }
  int order() const { return static_cast<int>(shape_.size()); }
  int64_t num_entries() const { return num_entries_; }
  int64_t stride(int axis) const { return strides_[axis]; }
  const std::vector<int64_t>& strides() const { return strides_; }

  // Bounds-checked access through a 1-based tuple.
  bool at(const IndexTuple& index) const { return test(linear_index(index)); }
  int64_t linear_index(const IndexTuple& index) const;

  bool test(int64_t linear) const {
    return (words_[linear >> 6] >> (linear & 63)) & 1u;
  }
  void set(int64_t linear) { words_[linear >> 6] |= uint64_t{1} << (linear & 63); }
  void reset(int64_t linear) {
    words_[linear >> 6] &= ~(uint64_t{1} << (linear & 63));
  }
  void assign(int64_t linear, bool value) {
    if (value) {
      set(linear);
    } else {
      reset(linear);
    }
  }

  // 0-based per-axis coordinates of a linear index.
  void unravel(int64_t linear, std::span<int64_t> axis_coords) const;

  // L1 norm.
  int64_t count() const;
  bool none() const;

  std::span<const uint64_t> words() const { return words_; }
  std::span<uint64_t> mutable_words() { return words_; }

  // Calls fn(linear) for every entry equal to 1, in ascending linear order.
  template <typename Fn>
  void for_each_one(Fn&& fn) const {
    const int64_t num_words = static_cast<int64_t>(words_.size());
    for (int64_t w = 0; w < num_words; ++w) {
      uint64_t bits = words_[w];
      while (bits != 0) {
        const int bit = std::countr_zero(bits);
        fn((w << 6) + bit);
        bits &= bits - 1;
      }
    }
  }

  std::vector<int64_t> ones_linear() const;

  bool operator==(const BoolTensor& other) const {
    return shape_ == other.shape_ && words_ == other.words_;
  }

 private:
  std::vector<int64_t> shape_;
  std::vector<int64_t> strides_;
  int64_t num_entries_ = 0;
  // Bits past num_entries_ in the last word are always zero.
  std::vector<uint64_t> words_;
};

// Non-negative integer tensor produced by slice sums and folding. Order 0
// (empty shape) is a scalar holding one value.
class IntTensor {
 public:
  explicit IntTensor(std::vector<int64_t> shape);

  const std::vector<int64_t>& shape() const { return shape_; }
  int order() const { return static_cast<int>(shape_.size()); }
  int64_t num_entries() const { return static_cast<int64_t>(data_.size()); }

  // 0-based per-axis access.
  int64_t value(std::span<const int64_t> axis_coords) const;
  int64_t& operator[](int64_t linear) { return data_[linear]; }
  int64_t operator[](int64_t linear) const { return data_[linear]; }
  const std::vector<int64_t>& data() const { return data_; }
  int64_t total() const;

 private:
  std::vector<int64_t> shape_;
  std::vector<int64_t> data_;
};

// k binary fibers whose outer product is one rank-1 tensor. Any all-zero
// fiber makes the pattern empty.
struct Rank1Pattern {
  std::vector<Fiber> fibers;

  int order() const { return static_cast<int>(fibers.size()); }
  std::vector<int64_t> shape() const;
  bool empty() const;
  // Number of entries covered by the outer product.
  int64_t size() const;

  static Rank1Pattern empty_for(const std::vector<int64_t>& shape);

  bool operator==(const Rank1Pattern&) const = default;
};

// Row-major dense binary matrix; the on-disk view of one factor matrix.
struct BitMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int64_t r, int64_t c) const { return data[r * cols + c]; }
  bool operator==(const BitMatrix&) const = default;
};

// k pattern matrices (m_j x l) sharing a rank l. Stored column-wise: column j
// of every matrix together form pattern j.
class FactorSet {
 public:
  explicit FactorSet(std::vector<int64_t> shape);

  static FactorSet from_matrices(const std::vector<BitMatrix>& matrices);

  const std::vector<int64_t>& shape() const { return shape_; }
  int order() const { return static_cast<int>(shape_.size()); }
  int rank() const { return static_cast<int>(patterns_.size()); }
  const std::vector<Rank1Pattern>& patterns() const { return patterns_; }
  const Rank1Pattern& pattern(int column) const { return patterns_[column]; }

  // Appends one column to every matrix. Throws Error{kShape} on mismatch.
  void append(Rank1Pattern pattern);

  // Factor matrix of a 1-based mode.
  BitMatrix matrix(int mode) const;

  bool operator==(const FactorSet&) const = default;

 private:
  std::vector<int64_t> shape_;
  std::vector<Rank1Pattern> patterns_;
};

}  // namespace getf

#endif  // GETF_BOOL_TENSOR_H_
