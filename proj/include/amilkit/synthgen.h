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

#ifndef AMILKIT_SYNTHGEN_H_
#define AMILKIT_SYNTHGEN_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "amilkit/kgstore.h"
#include "amilkit/random.h"
#include "amilkit/textpipe.h"
#include "json.hpp"

namespace amilkit {

// Seeded generator for a typed graph and a templated corpus whose per-triple
// support follows a heavy-tailed distribution.
struct SynthConfig {
  int n_types = 4;
  int entities_per_type = 50;
  int n_relations = 10;
  int n_triples = 400;
  // Support per triple is 1 + floor(X), X ~ Lomax(alpha) (Pareto shifted to
  // start at zero), capped at max_support.
  double pareto_alpha = 1.16;
  int max_support = 64;
  // Fraction of support sentences phrased without a relational template.
  double noise_rate = 0.3;
  // Extra sentences with three entity mentions, per support sentence.
  double distractor_rate = 0.05;
  int sentences_per_doc = 8;
  uint64_t seed = 7;

  // Throws kInvalidConfig.
  void Validate() const;
  nlohmann::json ToJson() const;
  static SynthConfig FromJson(const nlohmann::json& j);
};

enum class SentenceKind { kRelational, kNoise, kDistractor };
std::string_view SentenceKindName(SentenceKind kind);

// What the generator intended for one sentence.
struct GoldSentence {
  std::string doc_id;
  int index = 0;
  std::string text;
  EntityId head;
  EntityId tail;
  RelationId relation;  // KG edge behind the sentence
  SentenceKind kind = SentenceKind::kRelational;
  // Relation the text expresses: the edge relation for relational
  // sentences, NA for noise and distractors.
  RelationId intended_label;
};

struct SynthCorpus {
  std::vector<Document> documents;
  std::vector<GoldSentence> gold;
  std::map<Triple, int> support;  // sentences generated per triple
};

// Entities e0..e{n-1} with round-robin types T0..T{k-1}; each relation links
// one (type, type) signature. Throws kInvalidConfig if n_triples exceeds the
// number of available unordered entity pairs.
KnowledgeGraph GenKg(const SynthConfig& config);

SynthCorpus GenCorpus(const SynthConfig& config, const KnowledgeGraph& kg);

// Draws one support count.
int SampleSupport(double alpha, int cap, Rng& rng);

void WriteGold(const std::vector<GoldSentence>& gold, std::ostream& out);

}  // namespace amilkit

#endif  // AMILKIT_SYNTHGEN_H_
