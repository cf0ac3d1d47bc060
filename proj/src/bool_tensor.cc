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

#include "getf/bool_tensor.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "getf/error.h"

namespace getf {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kBounds: return "bounds";
    case ErrorKind::kMode: return "mode";
    case ErrorKind::kPermutation: return "permutation";
    case ErrorKind::kArity: return "arity";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kEmptyTensor: return "empty-tensor";
    case ErrorKind::kNoRegion: return "no-region";
    case ErrorKind::kDegenerateFiber: return "degenerate-fiber";
    case ErrorKind::kBudget: return "budget";
    case ErrorKind::kSpec: return "spec";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

int64_t fiber_count(const Fiber& fiber) {
  return std::count_if(fiber.begin(), fiber.end(),
                       [](std::uint8_t v) { return v != 0; });
}

bool fiber_is_zero(const Fiber& fiber) {
  return std::all_of(fiber.begin(), fiber.end(),
                     [](std::uint8_t v) { return v == 0; });
}

std::string IndexTuple::to_string() const {
  std::ostringstream out;
  out << '(';
  for (size_t i = 0; i < coords_.size(); ++i) {
    if (i > 0) out << ',';
    out << coords_[i];
  }
  out << ')';
  return out.str();
}

namespace {

std::string shape_string(const std::vector<int64_t>& shape) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

}  // namespace

int64_t checked_entry_count(const std::vector<int64_t>& shape) {
  if (shape.empty()) {
    throw Error(ErrorKind::kShape, "empty shape");
  }
  const int order = static_cast<int>(shape.size());
  if (order < BoolTensor::kMinOrder || order > BoolTensor::kMaxOrder) {
    throw Error(ErrorKind::kShape, "order " + std::to_string(order) +
                                       " outside supported range 2..8");
  }
  // Leave headroom so word counts and strides never overflow.
  constexpr int64_t kLimit = std::numeric_limits<int64_t>::max() / 128;
  int64_t total = 1;
  for (int64_t m : shape) {
    if (m <= 0) {
      throw Error(ErrorKind::kShape,
                  "non-positive mode length in " + shape_string(shape));
    }
    if (total > kLimit / m) {
      throw Error(ErrorKind::kShape,
                  "entry count overflows for shape " + shape_string(shape));
    }
    total *= m;
  }
  return total;
}

BoolTensor::BoolTensor(std::vector<int64_t> shape)
    : shape_(std::move(shape)) {
  num_entries_ = checked_entry_count(shape_);
  strides_.assign(shape_.size(), 1);
  for (int axis = order() - 2; axis >= 0; --axis) {
    strides_[axis] = strides_[axis + 1] * shape_[axis + 1];
  }
  words_.assign(static_cast<size_t>((num_entries_ + 63) / 64), 0);
}

BoolTensor BoolTensor::ones(std::vector<int64_t> shape) {
  BoolTensor t(std::move(shape));
  std::fill(t.words_.begin(), t.words_.end(), ~uint64_t{0});
  const int tail = static_cast<int>(t.num_entries_ & 63);
  if (tail != 0) t.words_.back() = (uint64_t{1} << tail) - 1;
  return t;
}

int64_t BoolTensor::linear_index(const IndexTuple& index) const {
  if (index.order() != order()) {
    throw Error(ErrorKind::kBounds, "index " + index.to_string() +
                                        " has wrong arity for shape " +
                                        shape_string(shape_));
  }
  int64_t linear = 0;
  for (int axis = 0; axis < order(); ++axis) {
    const int64_t c = index[axis];
    if (c < 1 || c > shape_[axis]) {
      throw Error(ErrorKind::kBounds, "index " + index.to_string() +
                                          " out of bounds for shape " +
                                          shape_string(shape_));
    }
    linear += (c - 1) * strides_[axis];
  }
  return linear;
}

void BoolTensor::unravel(int64_t linear, std::span<int64_t> axis_coords) const {
  for (int axis = 0; axis < order(); ++axis) {
    axis_coords[axis] = linear / strides_[axis];
    linear -= axis_coords[axis] * strides_[axis];
  }
}

int64_t BoolTensor::count() const {
  int64_t total = 0;
  for (uint64_t w : words_) total += std::popcount(w);
  return total;
}

bool BoolTensor::none() const {
  return std::all_of(words_.begin(), words_.end(),
                     [](uint64_t w) { return w == 0; });
}

std::vector<int64_t> BoolTensor::ones_linear() const {
  std::vector<int64_t> out;
  for_each_one([&](int64_t linear) { out.push_back(linear); });
  return out;
}

IntTensor::IntTensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
  int64_t total = 1;
  for (int64_t m : shape_) {
    if (m <= 0) throw Error(ErrorKind::kShape, "non-positive mode length");
    total *= m;
  }
  data_.assign(static_cast<size_t>(total), 0);
}

int64_t IntTensor::value(std::span<const int64_t> axis_coords) const {
  int64_t linear = 0;
  for (size_t axis = 0; axis < shape_.size(); ++axis) {
    linear = linear * shape_[axis] + axis_coords[axis];
  }
  return data_[linear];
}

int64_t IntTensor::total() const {
  return std::accumulate(data_.begin(), data_.end(), int64_t{0});
}

std::vector<int64_t> Rank1Pattern::shape() const {
  std::vector<int64_t> s;
  s.reserve(fibers.size());
  for (const Fiber& f : fibers) s.push_back(static_cast<int64_t>(f.size()));
  return s;
}

bool Rank1Pattern::empty() const {
  return fibers.empty() ||
         std::any_of(fibers.begin(), fibers.end(), fiber_is_zero);
}

int64_t Rank1Pattern::size() const {
  if (fibers.empty()) return 0;
  int64_t total = 1;
  for (const Fiber& f : fibers) total *= fiber_count(f);
  return total;
}

Rank1Pattern Rank1Pattern::empty_for(const std::vector<int64_t>& shape) {
  Rank1Pattern p;
  for (int64_t m : shape) p.fibers.emplace_back(static_cast<size_t>(m), 0);
  return p;
}

FactorSet::FactorSet(std::vector<int64_t> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw Error(ErrorKind::kShape, "empty factor shape");
  for (int64_t m : shape_) {
    if (m <= 0) throw Error(ErrorKind::kShape, "non-positive mode length");
  }
}

FactorSet FactorSet::from_matrices(const std::vector<BitMatrix>& matrices) {
  if (matrices.empty()) throw Error(ErrorKind::kShape, "no factor matrices");
  std::vector<int64_t> shape;
  const int64_t rank = matrices.front().cols;
  for (const BitMatrix& m : matrices) {
    if (m.cols != rank) {
      throw Error(ErrorKind::kShape, "factor matrices disagree on rank");
    }
    if (static_cast<int64_t>(m.data.size()) != m.rows * m.cols) {
      throw Error(ErrorKind::kShape, "factor matrix storage size mismatch");
    }
    shape.push_back(m.rows);
  }
  FactorSet set(shape);
  for (int64_t col = 0; col < rank; ++col) {
    Rank1Pattern p;
    for (const BitMatrix& m : matrices) {
      Fiber f(static_cast<size_t>(m.rows));
      for (int64_t r = 0; r < m.rows; ++r) f[r] = m.at(r, col) ? 1 : 0;
      p.fibers.push_back(std::move(f));
    }
    set.append(std::move(p));
  }
  return set;
}

void FactorSet::append(Rank1Pattern pattern) {
  if (pattern.shape() != shape_) {
    throw Error(ErrorKind::kShape, "pattern shape " +
                                       shape_string(pattern.shape()) +
                                       " does not match factor shape " +
                                       shape_string(shape_));
  }
  patterns_.push_back(std::move(pattern));
}

BitMatrix FactorSet::matrix(int mode) const {
  if (mode < 1 || mode > order()) {
    throw Error(ErrorKind::kMode, "mode " + std::to_string(mode) +
                                      " outside 1.." + std::to_string(order()));
  }
  BitMatrix m;
  m.rows = shape_[mode - 1];
  m.cols = rank();
  m.data.assign(static_cast<size_t>(m.rows * m.cols), 0);
  for (int col = 0; col < rank(); ++col) {
    const Fiber& f = patterns_[col].fibers[mode - 1];
    for (int64_t r = 0; r < m.rows; ++r) m.data[r * m.cols + col] = f[r];
  }
  return m;
}

}  // namespace getf
