// Copyright 2026 The amilkit Authors.
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

#include "amilkit/relation_repr.h"

#include <cmath>

#include "amilkit/random.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace amilkit {
namespace {

Matrix RandomHidden(int rows, int d, uint64_t seed) {
  Rng rng(seed);
  Matrix h(rows, d);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < d; ++c) h(r, c) = rng.Normal();
  }
  return h;
}

// Explicit loop, no Eigen reductions.
Vector LoopMean(const Matrix& h, int from, int to) {
  Vector out = Vector::Zero(h.cols());
  for (int r = from; r <= to; ++r) {
    for (int c = 0; c < h.cols(); ++c) out(c) += h(r, c);
  }
  return out / static_cast<double>(to - from + 1);
}

TEST(SpanPoolTest, MatchesLoop) {
  const Matrix h = RandomHidden(10, 6, 1);
  for (int j = 1; j < 10; ++j) {
    for (int k = j; k < 10; ++k) {
      EXPECT_TRUE(SpanPool(h, j, k).isApprox(LoopMean(h, j, k), 1e-12));
    }
  }
}

TEST(SpanPoolTest, SingleRow) {
  const Matrix h = RandomHidden(5, 3, 2);
  EXPECT_EQ(SpanPool(h, 3, 3), Vector(h.row(3).transpose()));
}

TEST(SpanPoolTest, InvalidSpans) {
  const Matrix h = RandomHidden(5, 3, 2);
  EXPECT_EQ(testing::CodeOf([&] { SpanPool(h, 0, 2); }), ErrorCode::kInvalidSpan);
  EXPECT_EQ(testing::CodeOf([&] { SpanPool(h, 3, 2); }), ErrorCode::kInvalidSpan);
  EXPECT_EQ(testing::CodeOf([&] { SpanPool(h, 2, 5); }), ErrorCode::kInvalidSpan);
}

TEST(MiddlePoolTest, RowsBetweenMentions) {
  // [CLS] ^ a ^ x y $ b $ : head mention row 2, tail row 7.
  const Matrix h = RandomHidden(9, 4, 3);
  EXPECT_TRUE(MiddlePool(h, {2, 2}, {7, 7}).isApprox(LoopMean(h, 4, 5), 1e-12));
  // Order of arguments follows textual order, not head/tail.
  EXPECT_TRUE(MiddlePool(h, {7, 7}, {2, 2}).isApprox(LoopMean(h, 4, 5), 1e-12));
}

TEST(MiddlePoolTest, AdjacentMentionsGiveZero) {
  // [CLS] ^ a ^ $ b $
  const Matrix h = RandomHidden(7, 4, 3);
  EXPECT_TRUE(MiddlePool(h, {2, 2}, {5, 5}).isZero());
}

TEST(SequencePoolTest, SkipsCls) {
  const Matrix h = RandomHidden(6, 4, 5);
  EXPECT_TRUE(SequencePool(h).isApprox(LoopMean(h, 1, 5), 1e-12));
}

TEST(ArchTest, MultipliersAndDims) {
  const int expected[17] = {1, 2, 3, 2, 3, 2, 3, 4, 5, 1, 2, 3, 4, 5, 6, 1, 2};
  // Tokens: ^ a b ^ and $ c $   -> 9 encoder rows with [CLS].
  const MarkerPositions m{0, 3, 5, 7};
  const int d = 8;
  const Matrix h = RandomHidden(9, d, 6);
  for (Arch arch : kAllArchs) {
    const int i = static_cast<int>(arch);
    EXPECT_EQ(Multiplier(arch), expected[i]) << ArchLetter(arch);
    EXPECT_EQ(BuildRepr(arch, h, m).size(), expected[i] * d) << ArchLetter(arch);
  }
}

TEST(ArchTest, ClsVariantsPrependRowZero) {
  const std::pair<Arch, Arch> pairs[] = {
      {Arch::C, Arch::B}, {Arch::E, Arch::D}, {Arch::G, Arch::F},
      {Arch::I, Arch::H}, {Arch::K, Arch::J}, {Arch::M, Arch::L},
      {Arch::O, Arch::N}, {Arch::Q, Arch::P}};
  const MarkerPositions m{0, 3, 5, 7};
  const int d = 5;
  const Matrix h = RandomHidden(9, d, 7);
  for (const auto& [with, without] : pairs) {
    const Vector a = BuildRepr(with, h, m);
    const Vector b = BuildRepr(without, h, m);
    ASSERT_EQ(a.size(), b.size() + d);
    EXPECT_EQ(a.head(d), Vector(h.row(0).transpose()));
    EXPECT_EQ(a.tail(b.size()), b) << ArchLetter(with);
  }
  EXPECT_EQ(BuildRepr(Arch::A, h, m), Vector(h.row(0).transpose()));
}

TEST(ArchTest, BlockContents) {
  // Tokens: ^ a b ^ and $ c $ ; rows shift by one.
  const MarkerPositions m{0, 3, 5, 7};
  const int d = 3;
  const Matrix h = RandomHidden(9, d, 8);
  const Vector b = BuildRepr(Arch::B, h, m);
  EXPECT_TRUE(b.head(d).isApprox(LoopMean(h, 2, 3), 1e-12));
  EXPECT_TRUE(b.tail(d).isApprox(LoopMean(h, 7, 7), 1e-12));
  const Vector hh = BuildRepr(Arch::H, h, m);
  EXPECT_EQ(hh.segment(0, d), Vector(h.row(1).transpose()));
  EXPECT_EQ(hh.segment(d, d), Vector(h.row(4).transpose()));
  EXPECT_EQ(hh.segment(2 * d, d), Vector(h.row(6).transpose()));
  EXPECT_EQ(hh.segment(3 * d, d), Vector(h.row(8).transpose()));
  const Vector j = BuildRepr(Arch::J, h, m);
  EXPECT_TRUE(j.isApprox(LoopMean(h, 5, 5), 1e-12));
}

TEST(ArchTest, TailBeforeHead) {
  // $ c $ x ^ a ^
  const MarkerPositions m{4, 6, 0, 2};
  const Matrix h = RandomHidden(8, 3, 9);
  EXPECT_TRUE(BuildRepr(Arch::J, h, m).isApprox(LoopMean(h, 4, 4), 1e-12));
  const Vector b = BuildRepr(Arch::B, h, m);
  EXPECT_TRUE(b.head(3).isApprox(LoopMean(h, 6, 6), 1e-12));
  EXPECT_TRUE(b.tail(3).isApprox(LoopMean(h, 2, 2), 1e-12));
}

TEST(ArchTest, MarkerOutOfRange) {
  const MarkerPositions m{0, 3, 5, 9};
  const Matrix h = RandomHidden(9, 3, 9);
  EXPECT_EQ(testing::CodeOf([&] { BuildRepr(Arch::H, h, m); }),
            ErrorCode::kInvalidSpan);
}

TEST(ArchTest, ParseAndNames) {
  for (Arch arch : kAllArchs) {
    EXPECT_EQ(ParseArch(std::string(1, ArchLetter(arch))), arch);
    EXPECT_FALSE(ArchDescription(arch).empty());
  }
  EXPECT_EQ(testing::CodeOf([] { ParseArch("R"); }), ErrorCode::kInvalidArch);
  EXPECT_EQ(testing::CodeOf([] { ParseArch("c"); }), ErrorCode::kInvalidArch);
  EXPECT_EQ(testing::CodeOf([] { ParseArch("AB"); }), ErrorCode::kInvalidArch);
}

// Backward is the transpose of the (linear) forward map: <dR, BuildRepr(h)>
// equals <BuildReprBackward(dR), h>.
TEST(ArchTest, BackwardIsAdjoint) {
  const MarkerPositions m{1, 3, 6, 9};
  const int rows = 12, d = 4;
  for (Arch arch : kAllArchs) {
    const Matrix h = RandomHidden(rows, d, 10 + static_cast<int>(arch));
    Rng rng(99);
    Vector dr(Multiplier(arch) * d);
    for (Eigen::Index i = 0; i < dr.size(); ++i) dr(i) = rng.Normal();
    Matrix dh = Matrix::Zero(rows, d);
    BuildReprBackward(arch, m, dr, dh);
    const double lhs = dr.dot(BuildRepr(arch, h, m));
    const double rhs = (dh.array() * h.array()).sum();
    EXPECT_NEAR(lhs, rhs, 1e-10) << ArchLetter(arch);
  }
}

}  // namespace
}  // namespace amilkit
