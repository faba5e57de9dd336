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

#ifndef AMILKIT_DISTSUP_H_
#define AMILKIT_DISTSUP_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amilkit/kgstore.h"
#include "amilkit/textpipe.h"

namespace amilkit {

inline constexpr std::string_view kHeadMarker = "^";
inline constexpr std::string_view kTailMarker = "$";
inline constexpr int kMaxSequenceLength = 128;

// A sentence holding exactly two resolved entities. Head and tail follow the
// graph edge direction, not textual order. Negatives carry label NA and a
// sentence whose text has one mention substituted.
struct Instance {
  Sentence sentence;
  Mention head;
  Mention tail;
  RelationId label;
  bool negative = false;

  Triple triple() const { return {head.entity, label, tail.entity}; }
};

struct Token {
  std::string text;
  size_t start = 0;
  size_t end = 0;
};

// Whitespace separated, with every punctuation byte split into its own token.
// Runs of letters, digits and non-ASCII bytes form word tokens.
std::vector<Token> Tokenize(std::string_view text);

// Token indices of the four marker tokens in a marked sentence.
struct MarkerPositions {
  int e1_start = 0;
  int e1_end = 0;
  int e2_start = 0;
  int e2_end = 0;

  bool operator==(const MarkerPositions&) const = default;
};

struct MarkedSentence {
  std::vector<std::string> tokens;
  MarkerPositions markers;

  // Inclusive token spans of the head/tail mention, between their markers.
  std::pair<int, int> head_span() const {
    return {markers.e1_start + 1, markers.e1_end - 1};
  }
  std::pair<int, int> tail_span() const {
    return {markers.e2_start + 1, markers.e2_end - 1};
  }
};

// Throws kInvalidSpan unless the marker layout invariants hold.
void CheckMarkers(const std::vector<std::string>& tokens,
                  const MarkerPositions& m);

// Positive instances: sentences whose mentions resolve to exactly two
// distinct entities that share an edge in either direction. When both
// directions are linked, the direction with the smaller head id wins.
std::vector<Instance> Align(const std::vector<Sentence>& sentences,
                            const DictionaryMatcher& matcher,
                            const KnowledgeGraph& kg, int workers = 1);

struct NegativeSamplingOptions {
  // NA triples = floor(ratio * |largest positive relation class|), in triples.
  double ratio = 0.7;
  // Also reject replacements whose reversed pair is linked.
  bool reject_reverse = true;
  // Give up after attempts_per_target * target draws.
  int attempts_per_target = 1000;
};

std::vector<Instance> SampleNegatives(
    const std::vector<Instance>& positives, const KnowledgeGraph& kg,
    uint64_t seed, const NegativeSamplingOptions& options = {});

// Number of NA triples SampleNegatives aims for.
size_t NegativeTarget(const std::vector<Instance>& positives, double ratio);

// Wraps the head mention in `^` tokens and the tail mention in `$` tokens.
// Sequences longer than `max_len` are truncated; throws kMarkerTruncated if
// that would drop a marker.
MarkedSentence InsertMarkers(const Instance& inst,
                             int max_len = kMaxSequenceLength);

enum class Split { kTrain, kDev, kTest };
std::string_view SplitName(Split s);
Split ParseSplit(std::string_view name);

struct SplitOptions {
  double test_fraction = 0.2;
  // Fraction of the non-test remainder.
  double dev_fraction = 0.1;
};

struct SplitAssignment {
  std::map<Triple, Split> triple_split;
  // Per input instance; empty when its sentence supports triples landing in
  // different splits.
  std::vector<std::optional<Split>> instance_split;
  size_t dropped_instances = 0;
};

// Shuffles the distinct triples with `seed` and assigns floor(test*N) to
// test, floor(dev*(N-test)) to dev and the rest to train. Throws
// kDegenerateSplits with fewer than 10 triples.
SplitAssignment MakeSplits(const std::vector<Instance>& instances,
                           uint64_t seed, const SplitOptions& options = {});

// One row of the instance file.
struct Example {
  int64_t id = 0;
  std::string doc_id;
  int index = 0;
  std::vector<std::string> tokens;
  MarkerPositions markers;
  EntityId head;
  EntityId tail;
  RelationId label;
  Split split = Split::kTrain;
  bool negative = false;

  Triple triple() const { return {head, label, tail}; }
  std::pair<int, int> head_span() const {
    return {markers.e1_start + 1, markers.e1_end - 1};
  }
  std::pair<int, int> tail_span() const {
    return {markers.e2_start + 1, markers.e2_end - 1};
  }
};

// JSON-lines {"id","doc_id","index","tokens","e1_start","e1_end","e2_start",
// "e2_end","head_entity","tail_entity","label","split","negative"}.
// Copies of the examples in `split`, in input order.
std::vector<Example> SelectSplit(std::span<const Example> examples, Split split);

void WriteExamples(const std::vector<Example>& examples, std::ostream& out);
std::vector<Example> ReadExamples(std::istream& in);
std::vector<Example> LoadExamples(const std::filesystem::path& path);

}  // namespace amilkit

#endif  // AMILKIT_DISTSUP_H_
