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

// Planted-pattern benchmark data, an exhaustive rank-1 oracle for tiny
// tensors, and scoring of recovered factors against planted ones.

#ifndef GETF_SYNTH_H_
#define GETF_SYNTH_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "getf/bool_tensor.h"

namespace getf {

struct SynthSpec {
  std::vector<int64_t> shape;
  int rank = 1;
  double factor_density = 0.2;
  double noise_flip = 0.0;
  uint64_t seed = 0;
};

// Scenario presets for planted benchmarks.
inline constexpr double kLowDensity = 0.2;
inline constexpr double kHighDensity = 0.4;
inline constexpr double kNoisyFlip = 0.05;

struct PlantedTensor {
  BoolTensor tensor;
  FactorSet truth;
};

// The generator draws from std::mt19937_64 (fully specified by the C++
// standard) and maps 53-bit draws to [0, 1) itself, so outputs are
// bit-identical for equal seeds on every conforming platform.
class SynthRng {
 public:
  explicit SynthRng(uint64_t seed) : engine_(seed) {}
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [lo, hi].
  int64_t integer(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(uniform() * static_cast<double>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

// Throws Error{kSpec} for an infeasible spec.
PlantedTensor generate_planted(const SynthSpec& spec);

// Exhaustive search over all non-zero fibers per mode. Ties resolve to the
// first candidate in enumeration order: modes outermost-first, each fiber
// enumerated as a bitmask (index 1 = least significant bit) ascending.
// Throws Error{kBudget} when the candidate space exceeds 2^24.
Rank1Pattern brute_force_best_rank1(const BoolTensor& x);

FactorSet greedy_oracle_decompose(const BoolTensor& x, int max_rank);

struct RecoveryScore {
  std::vector<std::pair<int, int>> matched_pairs;  // (recovered, planted)
  double mean_jaccard = 0.0;
  int rank_error = 0;
};

// Jaccard similarity of two rank-1 supports (1.0 when both are empty).
double pattern_jaccard(const Rank1Pattern& a, const Rank1Pattern& b);

// Maximum-weight one-to-one assignment of recovered to planted patterns;
// unmatched patterns on the larger side count as 0.
RecoveryScore score_recovery(const FactorSet& recovered,
                             const FactorSet& planted);

// Net coverage of a pattern: ones it covers minus zeros it covers.
int64_t net_coverage(const BoolTensor& x, const Rank1Pattern& pattern);

}  // namespace getf

#endif  // GETF_SYNTH_H_
