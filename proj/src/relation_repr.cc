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

#include <algorithm>

#include "amilkit/error.h"

namespace amilkit {
namespace {

using B = Block;

const std::array<std::vector<Block>, 17>& BlockTable() {
  static const std::array<std::vector<Block>, 17> table = {{
      {B::kCls},
      {B::kHeadPool, B::kTailPool},
      {B::kCls, B::kHeadPool, B::kTailPool},
      {B::kHeadStart, B::kTailStart},
      {B::kCls, B::kHeadStart, B::kTailStart},
      {B::kHeadEnd, B::kTailEnd},
      {B::kCls, B::kHeadEnd, B::kTailEnd},
      {B::kHeadStart, B::kHeadEnd, B::kTailStart, B::kTailEnd},
      {B::kCls, B::kHeadStart, B::kHeadEnd, B::kTailStart, B::kTailEnd},
      {B::kMiddle},
      {B::kCls, B::kMiddle},
      {B::kHeadEnd, B::kMiddle, B::kTailEnd},
      {B::kCls, B::kHeadEnd, B::kMiddle, B::kTailEnd},
      {B::kHeadStart, B::kHeadEnd, B::kMiddle, B::kTailStart, B::kTailEnd},
      {B::kCls, B::kHeadStart, B::kHeadEnd, B::kMiddle, B::kTailStart,
       B::kTailEnd},
      {B::kSequence},
      {B::kCls, B::kSequence},
  }};
  return table;
}

std::vector<int> Range(int from, int to) {
  std::vector<int> rows;
  for (int i = from; i <= to; ++i) rows.push_back(i);
  return rows;
}

Vector MeanRows(const Matrix& h, const std::vector<int>& rows) {
  Vector out = Vector::Zero(h.cols());
  if (rows.empty()) return out;
  for (int r : rows) out += h.row(r).transpose();
  return out / static_cast<double>(rows.size());
}

}  // namespace

char ArchLetter(Arch arch) { return static_cast<char>('A' + static_cast<int>(arch)); }

Arch ParseArch(std::string_view name) {
  if (name.size() == 1 && name[0] >= 'A' && name[0] <= 'Q') {
    return static_cast<Arch>(name[0] - 'A');
  }
  throw Error(ErrorCode::kInvalidArch,
              "architecture must be one of A..Q, got '" + std::string(name) +
                  "'");
}

std::string ArchDescription(Arch arch) {
  static const std::array<const char*, 17> names = {
      "[CLS]",
      "entity mention pool",
      "[CLS] + entity mention pool",
      "e1 start + e2 start",
      "[CLS] + e1 start + e2 start",
      "e1 end + e2 end",
      "[CLS] + e1 end + e2 end",
      "e1 start + e1 end + e2 start + e2 end",
      "[CLS] + e1 start + e1 end + e2 start + e2 end",
      "middle mention pool",
      "[CLS] + middle mention pool",
      "e1 end + middle mention pool + e2 end",
      "[CLS] + e1 end + middle mention pool + e2 end",
      "e1 start + e1 end + middle mention pool + e2 start + e2 end",
      "[CLS] + e1 start + e1 end + middle mention pool + e2 start + e2 end",
      "entire sequence average",
      "[CLS] + entire sequence average",
  };
  return names[static_cast<size_t>(arch)];
}

const std::vector<Block>& ArchBlocks(Arch arch) {
  return BlockTable()[static_cast<size_t>(arch)];
}

int Multiplier(Arch arch) { return static_cast<int>(ArchBlocks(arch).size()); }

Vector SpanPool(const Matrix& h, int j, int k) {
  if (j < 1 || j > k || k >= h.rows()) {
    throw Error(ErrorCode::kInvalidSpan,
                "span (" + std::to_string(j) + "," + std::to_string(k) +
                    ") invalid for " + std::to_string(h.rows()) + " rows");
  }
  return h.middleRows(j, k - j + 1).colwise().mean().transpose();
}

Vector MiddlePool(const Matrix& h, std::pair<int, int> head_span,
                  std::pair<int, int> tail_span) {
  const auto& first = head_span.first < tail_span.first ? head_span : tail_span;
  const auto& second = head_span.first < tail_span.first ? tail_span : head_span;
  // first.second + 1 is the closing marker, second.first - 1 the opening one.
  return MeanRows(h, Range(first.second + 2, second.first - 2));
}

Vector SequencePool(const Matrix& h) {
  return MeanRows(h, Range(1, static_cast<int>(h.rows()) - 1));
}

std::vector<int> BlockRows(Block block, const MarkerPositions& m,
                           int num_rows) {
  switch (block) {
    case Block::kCls:
      return {0};
    case Block::kHeadPool:
      return Range(m.e1_start + 2, m.e1_end);
    case Block::kTailPool:
      return Range(m.e2_start + 2, m.e2_end);
    case Block::kHeadStart:
      return {m.e1_start + 1};
    case Block::kHeadEnd:
      return {m.e1_end + 1};
    case Block::kTailStart:
      return {m.e2_start + 1};
    case Block::kTailEnd:
      return {m.e2_end + 1};
    case Block::kMiddle: {
      const int close = std::min(m.e1_end, m.e2_end) + 1;
      const int open = std::max(m.e1_start, m.e2_start) + 1;
      return Range(close + 1, open - 1);
    }
    case Block::kSequence:
      return Range(1, num_rows - 1);
  }
  return {};
}

Vector BuildRepr(Arch arch, const Matrix& h, const MarkerPositions& markers) {
  const auto d = h.cols();
  const auto& blocks = ArchBlocks(arch);
  const int rows = static_cast<int>(h.rows());
  if (std::max({markers.e1_end, markers.e2_end}) + 1 >= rows) {
    throw Error(ErrorCode::kInvalidSpan, "marker index beyond encoder output");
  }
  Vector out(d * static_cast<Eigen::Index>(blocks.size()));
  for (size_t b = 0; b < blocks.size(); ++b) {
    out.segment(static_cast<Eigen::Index>(b) * d, d) =
        MeanRows(h, BlockRows(blocks[b], markers, rows));
  }
  return out;
}

void BuildReprBackward(Arch arch, const MarkerPositions& markers,
                       const Vector& d_repr, Matrix& dh) {
  const auto d = dh.cols();
  const auto& blocks = ArchBlocks(arch);
  const int rows = static_cast<int>(dh.rows());
  for (size_t b = 0; b < blocks.size(); ++b) {
    const std::vector<int> block_rows = BlockRows(blocks[b], markers, rows);
    if (block_rows.empty()) continue;
    const double w = 1.0 / static_cast<double>(block_rows.size());
    auto grad = d_repr.segment(static_cast<Eigen::Index>(b) * d, d);
    for (int r : block_rows) dh.row(r) += w * grad.transpose();
  }
}

}  // namespace amilkit
