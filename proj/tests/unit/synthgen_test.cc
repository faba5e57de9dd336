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

#include "amilkit/synthgen.h"

#include <map>
#include <set>
#include <sstream>

#include "amilkit/distsup.h"
#include "amilkit/jsonl.h"
#include "amilkit/pipeline.h"
#include "amilkit/textpipe.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace amilkit {
namespace {

SynthConfig Small() {
  SynthConfig c;
  c.n_types = 2;
  c.entities_per_type = 10;
  c.n_relations = 2;
  c.n_triples = 30;
  return c;
}

TEST(GenKgTest, SmallGraph) {
  const KnowledgeGraph kg = GenKg(Small());
  EXPECT_EQ(kg.num_entities(), 20u);
  EXPECT_EQ(kg.edges().size(), 30u);
  EXPECT_EQ(kg.TypeOf("e0"), "T0");
  EXPECT_EQ(kg.TypeOf("e1"), "T1");
  EXPECT_EQ(kg.TypeOf("e19"), "T1");
  EXPECT_NO_THROW(kg.Validate());
}

TEST(GenKgTest, SameSeedSameGraph) {
  EXPECT_TRUE(GenKg(Small()) == GenKg(Small()));
  SynthConfig other = Small();
  other.seed = 8;
  EXPECT_FALSE(GenKg(Small()) == GenKg(other));
}

TEST(GenKgTest, OneSignaturePerRelation) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig c;
    c.seed = seed;
    const KnowledgeGraph kg = GenKg(c);
    std::map<RelationId, std::set<std::pair<std::string, std::string>>> sig;
    std::set<std::pair<EntityId, EntityId>> pairs;
    for (const auto& t : kg.edges()) {
      sig[t.relation].insert({kg.TypeOf(t.head), kg.TypeOf(t.tail)});
      // No pair is linked twice, in either direction.
      EXPECT_TRUE(pairs.insert(std::minmax(t.head, t.tail)).second);
    }
    EXPECT_EQ(sig.size(), static_cast<size_t>(c.n_relations));
    for (const auto& [r, s] : sig) EXPECT_EQ(s.size(), 1u) << r;
  }
}

TEST(GenKgTest, TooManyTriples) {
  SynthConfig c = Small();
  c.n_types = 1;
  c.entities_per_type = 4;  // 6 unordered pairs
  c.n_relations = 1;
  c.n_triples = 7;
  EXPECT_EQ(testing::CodeOf([&] { GenKg(c); }), ErrorCode::kInvalidConfig);
  c.n_triples = 6;
  EXPECT_EQ(GenKg(c).edges().size(), 6u);
}

TEST(SynthConfigTest, Validation) {
  auto code = [](auto mutate) {
    SynthConfig c;
    mutate(c);
    return testing::CodeOf([&] { c.Validate(); });
  };
  EXPECT_EQ(code([](SynthConfig& c) { c.n_types = 0; }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code([](SynthConfig& c) { c.pareto_alpha = 0; }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code([](SynthConfig& c) { c.noise_rate = 1.0; }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code([](SynthConfig& c) { c.noise_rate = -0.1; }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code([](SynthConfig& c) { c.max_support = 0; }), ErrorCode::kInvalidConfig);
  EXPECT_NO_THROW(SynthConfig().Validate());
}

TEST(SynthConfigTest, JsonRoundTrip) {
  SynthConfig c = Small();
  c.noise_rate = 0.25;
  c.seed = 99;
  const SynthConfig back = SynthConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
}

TEST(SupportTest, LongTailSkew) {
  // Direct counting over 5 seeds of the default graph.
  for (uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig c;
    c.seed = seed;
    const SynthCorpus corpus = GenCorpus(c, GenKg(c));
    size_t small = 0;
    for (const auto& [t, s] : corpus.support) {
      EXPECT_GE(s, 1);
      EXPECT_LE(s, 64);
      if (s <= 2) ++small;
    }
    EXPECT_EQ(corpus.support.size(), 400u);
    EXPECT_GE(static_cast<double>(small) / 400.0, 0.5) << "seed " << seed;
  }
}

TEST(SupportTest, SamplerBounds) {
  Rng rng(1);
  std::map<int, int> hist;
  for (int i = 0; i < 20000; ++i) ++hist[SampleSupport(1.16, 64, rng)];
  EXPECT_EQ(hist.begin()->first, 1);
  EXPECT_EQ(hist.rbegin()->first, 64);  // the cap is reached
  // P(support = 1) = 1 - 2^-alpha ~ 0.553.
  EXPECT_NEAR(hist[1] / 20000.0, 1.0 - std::pow(2.0, -1.16), 0.02);
}

TEST(GenCorpusTest, SupportsSumToSentences) {
  const SynthConfig c;
  const SynthCorpus corpus = GenCorpus(c, GenKg(c));
  int total = 0;
  for (const auto& [t, s] : corpus.support) total += s;
  size_t support_sentences = 0, distractors = 0;
  for (const auto& g : corpus.gold) {
    if (g.kind == SentenceKind::kDistractor) {
      ++distractors;
    } else {
      ++support_sentences;
    }
  }
  EXPECT_EQ(support_sentences, static_cast<size_t>(total));
  EXPECT_GT(distractors, 0u);
  // Sentences before dedupe: documents hold every gold sentence.
  EXPECT_EQ(SegmentCorpus(corpus.documents, 1).size(), corpus.gold.size());
}

TEST(GenCorpusTest, NoiseLabels) {
  SynthConfig c;
  c.noise_rate = 0.0;
  const SynthCorpus corpus = GenCorpus(c, GenKg(c));
  for (const auto& g : corpus.gold) {
    EXPECT_NE(g.kind, SentenceKind::kNoise);
    if (g.kind == SentenceKind::kRelational) EXPECT_EQ(g.intended_label, g.relation);
  }
  c.noise_rate = 0.5;
  const SynthCorpus noisy = GenCorpus(c, GenKg(c));
  size_t noise = 0;
  for (const auto& g : noisy.gold) {
    if (g.kind == SentenceKind::kNoise) {
      ++noise;
      EXPECT_EQ(g.intended_label, kNaRelation);
    }
  }
  EXPECT_GT(noise, noisy.gold.size() / 4);
}

TEST(GenCorpusTest, Deterministic) {
  const SynthConfig c;
  const KnowledgeGraph kg = GenKg(c);
  std::ostringstream a, b;
  WriteGold(GenCorpus(c, kg).gold, a);
  WriteGold(GenCorpus(c, kg).gold, b);
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream d1, d2;
  WriteCorpus(GenCorpus(c, kg).documents, d1);
  WriteCorpus(GenCorpus(c, kg).documents, d2);
  EXPECT_EQ(d1.str(), d2.str());
}

TEST(GenCorpusTest, DocumentChunks) {
  const SynthConfig c;
  const SynthCorpus corpus = GenCorpus(c, GenKg(c));
  ASSERT_FALSE(corpus.documents.empty());
  EXPECT_EQ(corpus.documents[0].doc_id, "doc00000");
  const size_t expected = (corpus.gold.size() + 7) / 8;
  EXPECT_EQ(corpus.documents.size(), expected);
}

TEST(GoldFileTest, Keys) {
  const SynthConfig c = Small();
  const SynthCorpus corpus = GenCorpus(c, GenKg(c));
  std::ostringstream out;
  WriteGold(corpus.gold, out);
  std::istringstream in(out.str());
  size_t lines = 0;
  ForEachJsonLine(in, [&](const nlohmann::json& j, size_t) {
    for (const char* key :
         {"doc_id", "index", "text", "head", "tail", "relation", "kind", "label"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    ++lines;
  });
  EXPECT_EQ(lines, corpus.gold.size());
}

// Every generated support sentence survives segmentation, matching and
// alignment as a positive instance on its own triple.
TEST(PipelineClosureTest, RecoversGeneratedPositives) {
  for (uint64_t seed : {7u, 8u, 9u}) {
    SynthConfig c;
    c.seed = seed;
    const KnowledgeGraph kg = GenKg(c);
    const SynthCorpus corpus = GenCorpus(c, kg);
    PreprocessOptions opts;
    const PreprocessResult pre = Preprocess(corpus.documents, kg, opts);
    std::set<std::tuple<std::string, int, EntityId, EntityId, RelationId>> got;
    for (const auto& e : pre.examples) {
      if (!e.negative) got.insert({e.doc_id, e.index, e.head, e.tail, e.label});
    }
    size_t want = 0, found = 0;
    for (const auto& g : corpus.gold) {
      if (g.kind == SentenceKind::kDistractor) continue;
      ++want;
      if (got.contains({g.doc_id, g.index, g.head, g.tail, g.relation})) ++found;
    }
    EXPECT_GT(want, 1000u);
    EXPECT_GE(static_cast<double>(found), 0.99 * static_cast<double>(want))
        << "seed " << seed << ": " << found << "/" << want;
    // Distractors carry three mentions and never align.
    for (const auto& g : corpus.gold) {
      if (g.kind != SentenceKind::kDistractor) continue;
      for (const auto& e : pre.examples) {
        if (e.negative) continue;
        EXPECT_FALSE(e.doc_id == g.doc_id && e.index == g.index);
      }
    }
  }
}

}  // namespace
}  // namespace amilkit
