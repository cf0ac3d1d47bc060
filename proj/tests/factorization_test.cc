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
#include <cstdint>
#include <set>
#include <vector>

#include "getf/bool_tensor.h"
#include "getf/error.h"
#include "getf/getf.h"
#include "getf/ltl.h"
#include "getf/synth.h"
#include "getf/tensor_ops.h"
#include "gtest/gtest.h"
#include "support/generators.h"

namespace getf {
namespace {

using ::getf::testing::random_pattern;
using ::getf::testing::random_tensor;

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a getf::Error";
  return ErrorKind::kIo;
}

// Fiber with ones at the given 1-based positions.
Fiber ones_at(int64_t m, std::initializer_list<int64_t> positions) {
  Fiber f(static_cast<size_t>(m), 0);
  for (int64_t p : positions) f[p - 1] = 1;
  return f;
}

// Pattern with a contiguous block [lo, hi] in every mode.
Rank1Pattern block(int k, int64_t m, int64_t lo, int64_t hi) {
  Rank1Pattern p;
  for (int a = 0; a < k; ++a) {
    Fiber f(static_cast<size_t>(m), 0);
    for (int64_t i = lo; i <= hi; ++i) f[i - 1] = 1;
    p.fibers.push_back(f);
  }
  return p;
}

// H and the thresholded fold straight from their definitions, walking
// every fiber of a 3-order tensor along mode 1.
BoolTensor direct_fold_mode1(const BoolTensor& x, const Fiber& factor,
                             double t) {
  const auto& s = x.shape();
  BoolTensor out({s[1], s[2]});
  const int64_t norm = fiber_count(factor);
  for (int64_t j = 1; j <= s[1]; ++j) {
    for (int64_t l = 1; l <= s[2]; ++l) {
      int64_t h = 0;
      for (int64_t i = 1; i <= s[0]; ++i) {
        if (factor[i - 1] && x.at({i, j, l})) ++h;
      }
      if (h > 0 && static_cast<double>(h) >= t * static_cast<double>(norm)) {
        out.set((j - 1) * s[2] + (l - 1));
      }
    }
  }
  return out;
}

TEST(DirectionSetTest, Examples) {
  const auto rot3 = direction_set(3, false);
  ASSERT_EQ(rot3.size(), 3u);
  EXPECT_EQ(rot3[0].fold_order, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(rot3[1].fold_order, (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(rot3[2].fold_order, (std::vector<int>{3, 1, 2}));

  const auto all3 = direction_set(3, true);
  EXPECT_EQ(all3.size(), 6u);
  std::set<std::vector<int>> distinct;
  for (const auto& d : all3) distinct.insert(d.fold_order);
  EXPECT_EQ(distinct.size(), 6u);

  const auto rot2 = direction_set(2, false);
  ASSERT_EQ(rot2.size(), 2u);
  EXPECT_EQ(rot2[0].fold_order, (std::vector<int>{1, 2}));
  EXPECT_EQ(rot2[1].fold_order, (std::vector<int>{2, 1}));

  EXPECT_EQ(direction_set(5, true).size(), 120u);
}

TEST(PatternFiberFindingTest, AllOnesAnchors) {
  const FiberPosition pos =
      pattern_fiber_finding(BoolTensor::ones({4, 6, 8}), 1);
  EXPECT_EQ(pos.free_mode, 1);
  EXPECT_EQ(pos.anchors, (std::vector<int64_t>{0, 2, 4}));
}

TEST(PatternFiberFindingTest, RankOneFiberEqualsFactor) {
  SynthRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Rank1Pattern p = random_pattern(rng, {7, 5, 6}, 0.5);
    const BoolTensor x = ltl_reorder(rank1_outer(p)).tensor;
    const FiberPosition pos = pattern_fiber_finding(x, 1);
    const Fiber f = mode_fiber(x, 1, pos.anchors);
    EXPECT_EQ(fiber_count(f), fiber_count(p.fibers[0]));
    // The anchored fiber is a full in-support fiber of the reordered tensor.
    EXPECT_EQ(rank1_outer(Rank1Pattern{{f, Fiber(5, 1), Fiber(6, 1)}}).count() *
                  fiber_count(p.fibers[1]) * fiber_count(p.fibers[2]),
              x.count() * 5 * 6);
  }
}

TEST(PatternFiberFindingTest, ZeroTensor) {
  EXPECT_EQ(kind_of([] { pattern_fiber_finding(BoolTensor({3, 3, 3}), 1); }),
            ErrorKind::kEmptyTensor);
}

TEST(DensestFiberTest, PicksLargestFiber) {
  BoolTensor x({3, 2, 2});
  x.set(x.linear_index({1, 2, 1}));
  x.set(x.linear_index({2, 2, 1}));
  x.set(x.linear_index({3, 1, 2}));
  const FiberPosition pos = densest_fiber_position(x, 1);
  EXPECT_EQ(pos.anchors, (std::vector<int64_t>{0, 2, 1}));
}

TEST(FoldOnceTest, RankOneIsExact) {
  const Fiber a = ones_at(4, {1, 3});
  const Fiber b = ones_at(3, {2, 3});
  const Fiber c = ones_at(5, {1, 4, 5});
  const BoolTensor x = rank1_outer(Rank1Pattern{{a, b, c}});
  FiberPosition pos{1, {0, 2, 4}};
  for (double t : {0.05, 0.5, 1.0}) {
    const FoldResult r = fold_once(x, pos, t);
    EXPECT_EQ(r.factor, a);
    EXPECT_EQ(r.folded, rank1_outer(Rank1Pattern{{b, c}}));
    for (int64_t j = 0; j < 3; ++j) {
      for (int64_t l = 0; l < 5; ++l) {
        const int64_t expected = (b[j] && c[l]) ? 2 : 0;
        EXPECT_EQ(r.overlap[j * 5 + l], expected);
      }
    }
  }
}

TEST(FoldOnceTest, SingleCorruptionEnumerated) {
  // Every single-bit corruption outside the pattern of a 3 x 3 x 3 tensor,
  // for factors with one and with two ones.
  const Fiber b = ones_at(3, {1, 2});
  const Fiber c = ones_at(3, {1, 3});
  for (const Fiber& a : {ones_at(3, {1}), ones_at(3, {1, 2})}) {
    const Rank1Pattern p{{a, b, c}};
    const BoolTensor clean = rank1_outer(p);
    const FiberPosition pos{1, {0, 1, 1}};
    const BoolTensor clean_fold = fold_once(clean, pos, 1.0).folded;
    ASSERT_EQ(clean_fold, rank1_outer(Rank1Pattern{{b, c}}));
    int completes = 0;
    for (int64_t lin = 0; lin < 27; ++lin) {
      if (clean.test(lin)) continue;
      BoolTensor x = clean;
      x.set(lin);
      std::vector<int64_t> ax(3);
      x.unravel(lin, ax);
      const bool on_anchor_fiber = ax[1] == 0 && ax[2] == 0;
      const FoldResult r = fold_once(x, pos, 1.0);
      const Fiber anchor = mode_fiber(x, 1, pos.anchors);
      EXPECT_EQ(r.factor, anchor);
      EXPECT_EQ(r.folded, direct_fold_mode1(x, anchor, 1.0));
      if (on_anchor_fiber) continue;
      // The corruption completes a match when a fiber outside the clean
      // fold now holds every one of the factor.
      const bool was_matched = b[ax[1]] && c[ax[2]];
      int64_t h = 0;
      for (int64_t i = 1; i <= 3; ++i) {
        if (a[i - 1] && x.at({i, ax[1] + 1, ax[2] + 1})) ++h;
      }
      const bool full_match = !was_matched && h == fiber_count(a);
      completes += full_match ? 1 : 0;
      EXPECT_EQ(r.folded == clean_fold, !full_match) << "corrupted " << lin;
    }
    if (fiber_count(a) == 1) {
      EXPECT_GT(completes, 0);
    } else {
      EXPECT_EQ(completes, 0);
    }
  }
}

TEST(FoldOnceTest, TinyToleranceKeepsAnyOverlap) {
  SynthRng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const BoolTensor x = random_tensor(rng, {4, 3, 5}, 0.4);
    const FiberPosition pos = densest_fiber_position(x, 1);
    if (fiber_is_zero(mode_fiber(x, 1, pos.anchors))) continue;
    const FoldResult r = fold_once(x, pos, 1e-9);
    for (int64_t i = 0; i < r.folded.num_entries(); ++i) {
      EXPECT_EQ(r.folded.test(i), r.overlap[i] >= 1);
    }
  }
}

TEST(FoldOnceTest, ZeroFiberIsDegenerate) {
  BoolTensor x({3, 3, 3});
  x.set(x.linear_index({1, 1, 1}));
  EXPECT_EQ(kind_of([&] { fold_once(x, FiberPosition{1, {0, 2, 2}}, 0.5); }),
            ErrorKind::kDegenerateFiber);
}

TEST(GeometricFoldingTest, RankOneAnyDirection) {
  SynthRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<int64_t> shape{6, 7, 5, 6};
    Rank1Pattern p = random_pattern(rng, shape, 0.5);
    if (p.size() < 4) continue;
    const BoolTensor x = rank1_outer(p);
    const SimplexRegion region = two_ltl_projection(ltl_reorder(x).tensor);
    for (bool exha : {false, true}) {
      for (const Direction& d : direction_set(4, exha)) {
        for (double t : {0.3, 0.7, 1.0}) {
          EXPECT_EQ(geometric_folding(x, region, d, t), p);
        }
      }
    }
  }
}

TEST(GeometricFoldingTest, LargerDisjointBlockWins) {
  // A 4x4x4 block and a 2x2x2 block on disjoint indices of 8x8x8.
  const Rank1Pattern big = block(3, 8, 1, 4);
  const Rank1Pattern small = block(3, 8, 6, 7);
  const BoolTensor x =
      elementwise(rank1_outer(big), rank1_outer(small), BoolOp::kSum);
  const SimplexRegion region = two_ltl_projection(ltl_reorder(x).tensor);
  for (const Direction& d : direction_set(3, true)) {
    EXPECT_EQ(geometric_folding(x, region, d, 0.7), big);
  }
  const DecompositionResult r = getf_decompose(x);
  ASSERT_EQ(r.factors.rank(), 2);
  EXPECT_EQ(r.factors.pattern(0), big);
  EXPECT_EQ(r.factors.pattern(1), small);
  EXPECT_EQ(r.error_trace.back(), 0);
}

TEST(GeometricFoldingTest, ZeroResidualGivesEmptyPattern) {
  const BoolTensor z({4, 4, 4});
  SimplexRegion region{{4.0, 4.0, 4.0}, 0.0};
  const Rank1Pattern p = geometric_folding(z, region, direction_set(3, false)[0], 0.7);
  EXPECT_TRUE(p.empty());
  EXPECT_EQ(p.shape(), z.shape());
}

TEST(MatrixBaseCaseTest, RankOneExact) {
  const Fiber a = ones_at(5, {2, 3, 5});
  const Fiber b = ones_at(4, {1, 4});
  const BoolTensor m = rank1_outer(Rank1Pattern{{a, b}});
  for (double t : {0.1, 0.6, 1.0}) {
    const auto [rows, cols] = matrix_base_case(m, t);
    EXPECT_EQ(rows, a);
    EXPECT_EQ(cols, b);
  }
}

TEST(MatrixBaseCaseTest, IdentityPicksLowestCell) {
  BoolTensor id({2, 2});
  id.set(0);
  id.set(3);
  const auto [rows, cols] = matrix_base_case(id, 0.6);
  EXPECT_EQ(rows, ones_at(2, {1}));
  EXPECT_EQ(cols, ones_at(2, {1}));
}

TEST(MatrixBaseCaseTest, ZeroMatrixIsEmpty) {
  const auto [rows, cols] = matrix_base_case(BoolTensor({3, 4}), 0.5);
  EXPECT_TRUE(fiber_is_zero(rows) || fiber_is_zero(cols));
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_EQ(cols.size(), 4u);
}

TEST(CandidateCostTest, Examples) {
  const Rank1Pattern p{{ones_at(3, {1, 2}), ones_at(4, {2, 3, 4})}};
  const BoolTensor x = rank1_outer(p);
  const FactorSet none(x.shape());
  EXPECT_EQ(candidate_cost(p, x, none), 0);
  EXPECT_EQ(candidate_cost(Rank1Pattern::empty_for(x.shape()), x, none),
            x.count());
}

TEST(CandidateCostTest, XorAccounting) {
  SynthRng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<int64_t> shape{4, 5, 3};
    const BoolTensor x = random_tensor(rng, shape, 0.35);
    FactorSet accepted(shape);
    const int rank = static_cast<int>(rng.integer(0, 2));
    for (int j = 0; j < rank; ++j) accepted.append(random_pattern(rng, shape, 0.4));
    const Rank1Pattern cand = random_pattern(rng, shape, 0.5);
    const BoolTensor prev = reconstruct(accepted);
    const BoolTensor cover = rank1_outer(cand);
    // Cells the candidate newly switches on: true ones fixed, zeros broken.
    int64_t newly_true = 0;
    int64_t newly_false = 0;
    for (int64_t i = 0; i < x.num_entries(); ++i) {
      if (cover.test(i) && !prev.test(i)) {
        ++(x.test(i) ? newly_true : newly_false);
      }
    }
    const int64_t before = reconstruction_error(x, accepted);
    EXPECT_EQ(candidate_cost(cand, x, accepted), before - newly_true + newly_false);
  }
}

TEST(ResidualClearTest, Examples) {
  const Rank1Pattern p{{ones_at(3, {1, 2}), ones_at(3, {2, 3})}};
  const BoolTensor covered = rank1_outer(p);
  EXPECT_TRUE(residual_clear(covered, p).none());
  EXPECT_EQ(residual_clear(covered, Rank1Pattern::empty_for({3, 3})), covered);
  const Rank1Pattern disjoint{{ones_at(3, {3}), ones_at(3, {1})}};
  EXPECT_EQ(residual_clear(covered, disjoint), covered);
}

TEST(GetfConfigTest, ValidateRanges) {
  auto bad = [](auto mutate) {
    GetfConfig c;
    mutate(c);
    return kind_of([&] { c.validate(); });
  };
  EXPECT_EQ(bad([](GetfConfig& c) { c.t = 0.0; }), ErrorKind::kParameter);
  EXPECT_EQ(bad([](GetfConfig& c) { c.t = 1.5; }), ErrorKind::kParameter);
  EXPECT_EQ(bad([](GetfConfig& c) { c.tau = -0.1; }), ErrorKind::kParameter);
  EXPECT_EQ(bad([](GetfConfig& c) { c.lambda = 0; }), ErrorKind::kParameter);
  EXPECT_EQ(bad([](GetfConfig& c) { c.max_rank = -1; }), ErrorKind::kParameter);
  GetfConfig ok;
  ok.t = 1.0;
  ok.tau = 1.0;
  EXPECT_NO_THROW(ok.validate());
  EXPECT_EQ(ok.effective_max_rank({3, 4}), 7);
  EXPECT_EQ(ok.effective_max_rank({30, 30}), 20);
}

TEST(GetfDecomposeTest, PlantedRankOne) {
  SynthRng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Rank1Pattern p = random_pattern(rng, {9, 10, 8}, 0.4);
    if (p.size() < 4) continue;
    const BoolTensor x = rank1_outer(p);
    const DecompositionResult r = getf_decompose(x);
    ASSERT_EQ(r.factors.rank(), 1);
    EXPECT_EQ(r.factors.pattern(0), p);
    EXPECT_EQ(r.error_trace, (std::vector<int64_t>{0}));
    EXPECT_TRUE(r.converged_reason == ConvergedReason::kEmptyResidual ||
                r.converged_reason == ConvergedReason::kTau);
  }
}

TEST(GetfDecomposeTest, TauOneAcceptsNothing) {
  const PlantedTensor planted =
      generate_planted({{10, 10, 10}, 3, 0.3, 0.05, 4});
  GetfConfig config;
  config.tau = 1.0;
  const DecompositionResult r = getf_decompose(planted.tensor, config);
  EXPECT_EQ(r.factors.rank(), 0);
  EXPECT_TRUE(r.error_trace.empty());
  EXPECT_EQ(r.converged_reason, ConvergedReason::kTau);
}

TEST(GetfDecomposeTest, ZeroTensor) {
  const DecompositionResult r = getf_decompose(BoolTensor({5, 5, 5}));
  EXPECT_EQ(r.factors.rank(), 0);
  EXPECT_EQ(r.initial_error, 0);
  EXPECT_EQ(r.converged_reason, ConvergedReason::kEmptyResidual);
}

TEST(GetfDecomposeTest, MaxRankStops) {
  const BoolTensor x = elementwise(rank1_outer(block(3, 8, 1, 4)),
                                   rank1_outer(block(3, 8, 6, 7)), BoolOp::kSum);
  GetfConfig config;
  config.max_rank = 1;
  const DecompositionResult r = getf_decompose(x, config);
  EXPECT_EQ(r.factors.rank(), 1);
  EXPECT_EQ(r.converged_reason, ConvergedReason::kMaxRank);
}

TEST(GetfDecomposeTest, PlantedRankFiveReachesZero) {
  const PlantedTensor planted =
      generate_planted({{50, 50, 50}, 5, kLowDensity, 0.0, 1});
  const DecompositionResult r = getf_decompose(planted.tensor);
  ASSERT_FALSE(r.error_trace.empty());
  EXPECT_EQ(r.error_trace.back(), 0);
  EXPECT_LE(r.factors.rank(), 5);
  EXPECT_EQ(reconstruction_error(planted.tensor, r.factors), 0);
}

TEST(GetfDecomposeTest, ThreadCountDoesNotChangeResult) {
  const PlantedTensor planted =
      generate_planted({{12, 12, 12, 12}, 3, 0.3, 0.02, 8});
  GetfConfig one;
  one.threads = 1;
  GetfConfig many;
  many.threads = 4;
  const DecompositionResult a = getf_decompose(planted.tensor, one);
  const DecompositionResult b = getf_decompose(planted.tensor, many);
  EXPECT_EQ(a.factors, b.factors);
  EXPECT_EQ(a.error_trace, b.error_trace);
}

TEST(GetfDecomposeTest, InvalidConfigRejected) {
  GetfConfig config;
  config.t = 2.0;
  EXPECT_EQ(kind_of([&] { getf_decompose(BoolTensor({2, 2}), config); }),
            ErrorKind::kParameter);
}

}  // namespace
}  // namespace getf
