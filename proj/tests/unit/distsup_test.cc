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

#include "amilkit/distsup.h"

#include <map>
#include <set>
#include <sstream>

#include "amilkit/random.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace amilkit {
namespace {

using testing::CodeOf;
using testing::KgFromText;

KnowledgeGraph Anatomy() { return LoadKg(testing::DataPath("anatomy_kg.tsv")); }

std::vector<Instance> AlignTexts(const KnowledgeGraph& kg,
                                 const std::vector<std::string>& texts) {
  std::vector<Sentence> sentences;
  for (size_t i = 0; i < texts.size(); ++i) {
    sentences.push_back({"d", static_cast<int>(i), texts[i]});
  }
  return Align(sentences, DictionaryMatcher::Build(kg), kg);
}

Instance MakeInstance(const std::string& text, const std::string& head,
                      const std::string& head_surface, const std::string& tail,
                      const std::string& tail_surface) {
  Instance inst;
  inst.sentence = {"d", 0, text};
  const size_t h = text.find(head_surface);
  const size_t t = text.find(tail_surface);
  inst.head = {head, h, h + head_surface.size(), head_surface};
  inst.tail = {tail, t, t + tail_surface.size(), tail_surface};
  inst.label = "r";
  return inst;
}

TEST(TokenizeTest, SplitsPunctuation) {
  std::vector<std::string> got;
  for (const auto& t : Tokenize("The calf-bone's (x)  ok.")) got.push_back(t.text);
  EXPECT_EQ(got, (std::vector<std::string>{"The", "calf", "-", "bone", "'", "s",
                                           "(", "x", ")", "ok", "."}));
}

TEST(AlignTest, DirectionFollowsGraph) {
  const auto kg = Anatomy();
  const auto out = AlignTexts(kg, {"The tibia lies beside the fibula."});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].head.entity, "fibula");
  EXPECT_EQ(out[0].tail.entity, "tibia");
  EXPECT_EQ(out[0].label, "articulates_with");
  EXPECT_EQ(out[0].head.surface, "fibula");
  EXPECT_FALSE(out[0].negative);
}

TEST(AlignTest, ThreeEntitiesRejected) {
  const auto kg = Anatomy();
  EXPECT_TRUE(AlignTexts(kg, {"The fibula, tibia and ulna."}).empty());
}

TEST(AlignTest, UnlinkedPairRejected) {
  const auto kg = Anatomy();
  EXPECT_TRUE(AlignTexts(kg, {"The fibula and the ulna."}).empty());
}

TEST(AlignTest, RepeatedMentionCountsOnce) {
  const auto kg = Anatomy();
  const auto out =
      AlignTexts(kg, {"Aspirin treats fever, and aspirin again lowers pyrexia."});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].triple(), (Triple{"aspirin", "treats", "fever"}));
  EXPECT_EQ(out[0].tail.surface, "fever");
}

TEST(AlignTest, SingleEntityRejected) {
  const auto kg = Anatomy();
  EXPECT_TRUE(AlignTexts(kg, {"The fibula and the calf bone."}).empty());
}

TEST(AlignTest, BothDirectionsLinkedUsesSmallerHeadId) {
  const auto kg = KgFromText(
      "E\tb\tT\nE\ta\tT\nS\ta\talpha\nS\tb\tbeta\n"
      "R\ta\tr1\tb\nR\tb\tr0\ta\n");
  const auto out = AlignTexts(kg, {"beta meets alpha."});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].triple(), (Triple{"a", "r1", "b"}));
}

TEST(AlignTest, WorkerCountDoesNotChangeOutput) {
  const auto kg = Anatomy();
  std::vector<Sentence> s;
  for (int i = 0; i < 50; ++i) {
    s.push_back({"d", i, i % 3 ? "The tibia and fibula " + std::to_string(i) + "."
                               : "Aspirin for fever."});
  }
  const auto m = DictionaryMatcher::Build(kg);
  const auto a = Align(s, m, kg, 1);
  const auto b = Align(s, m, kg, 4);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sentence, b[i].sentence);
    EXPECT_EQ(a[i].triple(), b[i].triple());
  }
}

// A chain graph with a 100-triple class "r" and a 40-triple class "s".
struct ChainFixture {
  KnowledgeGraph kg;
  std::vector<Instance> positives;
};

ChainFixture Chain() {
  ChainFixture f;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const std::string id = "x" + std::to_string(i);
    f.kg.AddEntity(id, i % 2 ? "Odd" : "Even");
    f.kg.AddSurfaceForm(id, "ent" + std::to_string(i));
    if (i % 5 == 0) f.kg.AddSurfaceForm(id, "alias" + std::to_string(i) + " form");
  }
  auto add = [&](int h, const std::string& r, int t) {
    const std::string hs = "ent" + std::to_string(h);
    const std::string ts = "ent" + std::to_string(t);
    f.kg.AddEdge({"x" + std::to_string(h), r, "x" + std::to_string(t)});
    Instance inst = MakeInstance("In study " + hs + " relates to " + ts + " here.",
                                 "x" + std::to_string(h), hs,
                                 "x" + std::to_string(t), ts);
    inst.label = r;
    f.positives.push_back(inst);
  };
  for (int i = 0; i < 100; ++i) add(i, "r", i + 1);
  for (int i = 0; i < 40; ++i) add(150 + i, "s", 151 + i);
  // A second sentence for some triples must not change the triple count.
  for (int i = 0; i < 10; ++i) f.positives.push_back(f.positives[i]);
  f.kg.Validate();
  return f;
}

TEST(NegativesTest, SeventyPercentOfLargestClass) {
  const auto f = Chain();
  EXPECT_EQ(NegativeTarget(f.positives, 0.7), 70u);
  const auto neg = SampleNegatives(f.positives, f.kg, 11);
  std::set<Triple> triples;
  for (const auto& n : neg) triples.insert(n.triple());
  EXPECT_EQ(triples.size(), 70u);
  EXPECT_EQ(neg.size(), 70u);
}

TEST(NegativesTest, Invariants) {
  const auto f = Chain();
  for (uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto& n : SampleNegatives(f.positives, f.kg, seed)) {
      EXPECT_EQ(n.label, kNaRelation);
      EXPECT_TRUE(n.negative);
      EXPECT_NE(n.head.entity, n.tail.entity);
      EXPECT_FALSE(f.kg.Linked(n.head.entity, n.tail.entity));
      EXPECT_FALSE(f.kg.Linked(n.tail.entity, n.head.entity));
      const std::string& text = n.sentence.text;
      for (const Mention* m : {&n.head, &n.tail}) {
        EXPECT_EQ(text.substr(m->start, m->end - m->start), m->surface);
        const auto& forms = f.kg.surface_forms().at(m->entity);
        EXPECT_NE(std::find(forms.begin(), forms.end(), m->surface), forms.end());
      }
      // The marked sentence must still be well formed.
      EXPECT_NO_THROW(InsertMarkers(n));
    }
  }
}

TEST(NegativesTest, Deterministic) {
  const auto f = Chain();
  const auto a = SampleNegatives(f.positives, f.kg, 3);
  const auto b = SampleNegatives(f.positives, f.kg, 3);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sentence, b[i].sentence);
    EXPECT_EQ(a[i].triple(), b[i].triple());
  }
  const auto c = SampleNegatives(f.positives, f.kg, 4);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= !(a[i].triple() == c[i].triple());
  EXPECT_TRUE(differs);
}

// In a 3-cycle every replacement lands on a reverse edge.
TEST(NegativesTest, ReverseEdgeRejection) {
  const auto kg = KgFromText(
      "E\ta\tT\nE\tb\tT\nE\tc\tT\nS\ta\talpha\nS\tb\tbeta\nS\tc\tgamma\n"
      "R\ta\tr\tb\nR\tb\tr\tc\nR\tc\tr\ta\n");
  const std::vector<Instance> positives = {
      MakeInstance("alpha binds beta.", "a", "alpha", "b", "beta"),
      MakeInstance("beta binds gamma.", "b", "beta", "c", "gamma"),
      MakeInstance("gamma binds alpha.", "c", "gamma", "a", "alpha")};
  EXPECT_EQ(NegativeTarget(positives, 0.7), 2u);
  NegativeSamplingOptions strict;
  strict.attempts_per_target = 50;
  try {
    SampleNegatives(positives, kg, 1, strict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientCandidates);
    EXPECT_NE(std::string(e.what()).find("reached 0 of 2"), std::string::npos);
  }
  NegativeSamplingOptions loose = strict;
  loose.reject_reverse = false;
  const auto neg = SampleNegatives(positives, kg, 1, loose);
  ASSERT_EQ(neg.size(), 2u);
  for (const auto& n : neg) {
    EXPECT_FALSE(kg.Linked(n.head.entity, n.tail.entity));
    EXPECT_TRUE(kg.Linked(n.tail.entity, n.head.entity));
  }
}

std::vector<std::string> MarkedTokens(const Instance& inst) {
  return InsertMarkers(inst).tokens;
}

TEST(MarkersTest, Basic) {
  const auto inst = MakeInstance("fibula articulates with tibia", "fibula",
                                 "fibula", "tibia", "tibia");
  const auto m = InsertMarkers(inst);
  EXPECT_EQ(m.tokens, (std::vector<std::string>{"^", "fibula", "^", "articulates",
                                                "with", "$", "tibia", "$"}));
  EXPECT_EQ(m.markers, (MarkerPositions{0, 2, 5, 7}));
  EXPECT_EQ(m.head_span(), (std::pair<int, int>{1, 1}));
  EXPECT_EQ(m.tail_span(), (std::pair<int, int>{6, 6}));
}

TEST(MarkersTest, HeadAfterTail) {
  const auto inst = MakeInstance("the tibia meets the calf bone .", "fibula",
                                 "calf bone", "tibia", "tibia");
  const auto m = InsertMarkers(inst);
  EXPECT_EQ(m.tokens, (std::vector<std::string>{"the", "$", "tibia", "$", "meets",
                                                "the", "^", "calf", "bone", "^",
                                                "."}));
  EXPECT_EQ(m.markers, (MarkerPositions{6, 9, 1, 3}));
}

TEST(MarkersTest, SpansRoundTrip) {
  const auto inst = MakeInstance("Treatment with acetylsalicylic acid reduced pyrexia.",
                                 "aspirin", "acetylsalicylic acid", "fever", "pyrexia");
  const auto m = InsertMarkers(inst);
  auto [j, k] = m.head_span();
  EXPECT_EQ(std::vector<std::string>(m.tokens.begin() + j, m.tokens.begin() + k + 1),
            (std::vector<std::string>{"acetylsalicylic", "acid"}));
  auto [l, r] = m.tail_span();
  EXPECT_EQ(std::vector<std::string>(m.tokens.begin() + l, m.tokens.begin() + r + 1),
            (std::vector<std::string>{"pyrexia"}));
}

std::string LongText(int n_tokens, int head_at, int tail_at) {
  std::string text;
  for (int i = 0; i < n_tokens; ++i) {
    if (i) text += ' ';
    text += i == head_at ? "HEAD" : i == tail_at ? "TAIL" : "w" + std::to_string(i);
  }
  return text;
}

TEST(MarkersTest, TruncationCutsMarker) {
  const auto inst = MakeInstance(LongText(300, 3, 250), "h", "HEAD", "t", "TAIL");
  EXPECT_EQ(CodeOf([&] { InsertMarkers(inst); }), ErrorCode::kMarkerTruncated);
}

TEST(MarkersTest, TruncationKeepsMarkers) {
  const auto inst = MakeInstance(LongText(300, 3, 20), "h", "HEAD", "t", "TAIL");
  const auto m = InsertMarkers(inst);
  EXPECT_EQ(m.tokens.size(), 128u);
  EXPECT_EQ(m.markers, (MarkerPositions{3, 5, 22, 24}));
  // Exactly at the limit: the last marker sits at index 127.
  const auto edge = MakeInstance(LongText(200, 0, 123), "h", "HEAD", "t", "TAIL");
  EXPECT_EQ(InsertMarkers(edge).markers.e2_end, 127);
  const auto over = MakeInstance(LongText(200, 0, 124), "h", "HEAD", "t", "TAIL");
  EXPECT_EQ(CodeOf([&] { InsertMarkers(over); }), ErrorCode::kMarkerTruncated);
}

TEST(MarkersTest, CheckMarkersRejectsBadLayouts) {
  const std::vector<std::string> t = {"^", "a", "^", "$", "b", "$"};
  EXPECT_NO_THROW(CheckMarkers(t, {0, 2, 3, 5}));
  EXPECT_EQ(CodeOf([&] { CheckMarkers(t, {0, 1, 3, 5}); }), ErrorCode::kInvalidSpan);
  EXPECT_EQ(CodeOf([&] { CheckMarkers(t, {0, 2, 3, 9}); }), ErrorCode::kInvalidSpan);
  const std::vector<std::string> nested = {"^", "$", "a", "$", "^"};
  EXPECT_EQ(CodeOf([&] { CheckMarkers(nested, {0, 4, 1, 3}); }), ErrorCode::kInvalidSpan);
}

std::vector<Instance> OnePerTriple(int n) {
  std::vector<Instance> out;
  for (int i = 0; i < n; ++i) {
    const std::string h = "h" + std::to_string(i);
    Instance inst = MakeInstance(h + " to t" + std::to_string(i), h, h,
                                 "t" + std::to_string(i), "t" + std::to_string(i));
    inst.label = "r" + std::to_string(i % 3);
    out.push_back(inst);
  }
  return out;
}

TEST(SplitsTest, ThousandTriples) {
  const auto inst = OnePerTriple(1000);
  const auto s = MakeSplits(inst, 1);
  std::map<Split, int> count;
  for (const auto& [t, split] : s.triple_split) ++count[split];
  EXPECT_EQ(count[Split::kTest], 200);
  EXPECT_EQ(count[Split::kDev], 80);
  EXPECT_EQ(count[Split::kTrain], 720);
  EXPECT_EQ(s.dropped_instances, 0u);
}

TEST(SplitsTest, FloorRounding) {
  const auto s = MakeSplits(OnePerTriple(19), 1);
  std::map<Split, int> count;
  for (const auto& [t, split] : s.triple_split) ++count[split];
  EXPECT_EQ(count[Split::kTest], 3);   // floor(3.8)
  EXPECT_EQ(count[Split::kDev], 1);    // floor(1.6)
  EXPECT_EQ(count[Split::kTrain], 15);
}

TEST(SplitsTest, TooFewTriples) {
  EXPECT_EQ(CodeOf([] { MakeSplits(OnePerTriple(9), 1); }),
            ErrorCode::kDegenerateSplits);
}

TEST(SplitsTest, SharedSentenceDropped) {
  auto inst = OnePerTriple(50);
  const auto first = MakeSplits(inst, 7);
  const Triple* test_triple = nullptr;
  const Triple* train_triple = nullptr;
  for (const auto& [t, split] : first.triple_split) {
    if (split == Split::kTest && !test_triple) test_triple = &t;
    if (split == Split::kTrain && !train_triple) train_triple = &t;
  }
  ASSERT_TRUE(test_triple && train_triple);
  for (const Triple* t : {test_triple, train_triple}) {
    Instance shared = MakeInstance("shared " + t->head + " and " + t->tail,
                                   t->head, t->head, t->tail, t->tail);
    shared.label = t->relation;
    shared.sentence.text = "Shared sentence.";
    inst.push_back(shared);
  }
  const auto second = MakeSplits(inst, 7);
  EXPECT_EQ(second.triple_split, first.triple_split);
  EXPECT_EQ(second.dropped_instances, 2u);
  EXPECT_FALSE(second.instance_split[50].has_value());
  EXPECT_FALSE(second.instance_split[51].has_value());
  for (size_t i = 0; i < 50; ++i) EXPECT_TRUE(second.instance_split[i].has_value());
}

TEST(SplitsTest, DisjointForAllSeeds) {
  auto inst = OnePerTriple(137);
  // Give some triples several sentences.
  for (int i = 0; i < 40; ++i) {
    Instance extra = inst[i];
    extra.sentence.text += " again " + std::to_string(i);
    inst.push_back(extra);
  }
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = MakeSplits(inst, seed);
    size_t test = 0;
    std::map<std::string, std::set<Split>> by_sentence;
    for (size_t i = 0; i < inst.size(); ++i) {
      ASSERT_TRUE(s.instance_split[i].has_value());
      EXPECT_EQ(*s.instance_split[i], s.triple_split.at(inst[i].triple()));
      by_sentence[inst[i].sentence.text].insert(*s.instance_split[i]);
    }
    for (const auto& [t, split] : s.triple_split) test += split == Split::kTest;
    EXPECT_EQ(test, 27u);
    for (const auto& [text, splits] : by_sentence) EXPECT_EQ(splits.size(), 1u);
  }
}

TEST(ExamplesIoTest, RoundTrip) {
  Example e;
  e.id = 4;
  e.doc_id = "doc";
  e.index = 2;
  e.tokens = {"^", "a", "^", "x", "$", "b", "$"};
  e.markers = {0, 2, 4, 6};
  e.head = "A";
  e.tail = "B";
  e.label = "r";
  e.split = Split::kDev;
  std::ostringstream out;
  WriteExamples({e, e}, out);
  std::istringstream in(out.str());
  const auto back = ReadExamples(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].tokens, e.tokens);
  EXPECT_EQ(back[0].markers, e.markers);
  EXPECT_EQ(back[0].split, Split::kDev);
  std::ostringstream again;
  WriteExamples(back, again);
  EXPECT_EQ(again.str(), out.str());
}

}  // namespace
}  // namespace amilkit
