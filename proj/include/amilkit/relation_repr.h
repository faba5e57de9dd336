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

#ifndef AMILKIT_RELATION_REPR_H_
#define AMILKIT_RELATION_REPR_H_

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amilkit/distsup.h"
#include "amilkit/params.h"

namespace amilkit {

// The 17 relation-representation architectures. Each odd/even pair differs
// only by a leading [CLS] block: (B,C), (D,E), (F,G), (H,I), (J,K), (L,M),
// (N,O), (P,Q).
enum class Arch { A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P, Q };

inline constexpr std::array<Arch, 17> kAllArchs = {
    Arch::A, Arch::B, Arch::C, Arch::D, Arch::E, Arch::F,
    Arch::G, Arch::H, Arch::I, Arch::J, Arch::K, Arch::L,
    Arch::M, Arch::N, Arch::O, Arch::P, Arch::Q};

char ArchLetter(Arch arch);
// Accepts a single letter A..Q; throws kInvalidArch otherwise.
Arch ParseArch(std::string_view name);
std::string ArchDescription(Arch arch);

// Building blocks of a representation, each a vector in R^d.
enum class Block {
  kCls,         // row 0
  kHeadPool,    // mean over head mention rows
  kTailPool,    // mean over tail mention rows
  kHeadStart,   // head opening marker row
  kHeadEnd,     // head closing marker row
  kTailStart,
  kTailEnd,
  kMiddle,      // mean over rows between the two mentions, zero if none
  kSequence,    // mean over every row except [CLS]
};

const std::vector<Block>& ArchBlocks(Arch arch);

// Representation width as a multiple of d.
int Multiplier(Arch arch);

// Mean of rows j..k (inclusive) of `h`. Requires 1 <= j <= k < h.rows();
// throws kInvalidSpan otherwise.
Vector SpanPool(const Matrix& h, int j, int k);

// Mean of the rows strictly between the textually earlier mention's closing
// marker and the later mention's opening marker. Spans are inclusive mention
// rows in encoder coordinates, each flanked by its marker rows.
Vector MiddlePool(const Matrix& h, std::pair<int, int> head_span,
                  std::pair<int, int> tail_span);

// Mean of rows 1..n.
Vector SequencePool(const Matrix& h);

// Encoder rows averaged for one block. `markers` are token indices in the
// marked sentence; encoder rows are shifted by one for [CLS].
std::vector<int> BlockRows(Block block, const MarkerPositions& markers,
                           int num_rows);

// Concatenation of the architecture's blocks; length Multiplier(arch) * d.
Vector BuildRepr(Arch arch, const Matrix& h, const MarkerPositions& markers);

// Adds d(loss)/d(h) given d(loss)/d(repr) to `dh`.
void BuildReprBackward(Arch arch, const MarkerPositions& markers,
                       const Vector& d_repr, Matrix& dh);

}  // namespace amilkit

#endif  // AMILKIT_RELATION_REPR_H_
