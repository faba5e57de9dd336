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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "amilkit/error.h"
#include "amilkit/jsonl.h"
#include "amilkit/parallel.h"
#include "amilkit/random.h"

namespace amilkit {
namespace {

bool IsSpaceByte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Floor of ratio * n, tolerant of representation error in the product.
size_t FloorFraction(double ratio, size_t n) {
  return static_cast<size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (IsSpaceByte(c)) {
      ++i;
    } else if (IsWordByte(c)) {
      size_t j = i;
      while (j < text.size() && IsWordByte(static_cast<unsigned char>(text[j]))) {
        ++j;
      }
      tokens.push_back({std::string(text.substr(i, j - i)), i, j});
      i = j;
    } else {
      tokens.push_back({std::string(1, text[i]), i, i + 1});
      ++i;
    }
  }
  return tokens;
}

void CheckMarkers(const std::vector<std::string>& tokens,
                  const MarkerPositions& m) {
  const int n = static_cast<int>(tokens.size());
  auto in_range = [n](int i) { return i >= 0 && i < n; };
  if (!in_range(m.e1_start) || !in_range(m.e1_end) || !in_range(m.e2_start) ||
      !in_range(m.e2_end)) {
    throw Error(ErrorCode::kInvalidSpan, "marker index out of range");
  }
  if (tokens[m.e1_start] != kHeadMarker || tokens[m.e1_end] != kHeadMarker ||
      tokens[m.e2_start] != kTailMarker || tokens[m.e2_end] != kTailMarker) {
    throw Error(ErrorCode::kInvalidSpan, "marker tokens not at marker indices");
  }
  if (m.e1_end - m.e1_start < 2 || m.e2_end - m.e2_start < 2) {
    throw Error(ErrorCode::kInvalidSpan, "empty entity span");
  }
  if (!(m.e1_end < m.e2_start || m.e2_end < m.e1_start)) {
    throw Error(ErrorCode::kInvalidSpan, "marker regions overlap");
  }
}

std::vector<Instance> Align(const std::vector<Sentence>& sentences,
                            const DictionaryMatcher& matcher,
                            const KnowledgeGraph& kg, int workers) {
  std::vector<std::optional<Instance>> found(sentences.size());
  ParallelFor(sentences.size(), workers, [&](size_t i) {
    const Sentence& s = sentences[i];
    std::vector<Mention> mentions = matcher.FindMentions(s);
    // First mention of each distinct entity, in textual order.
    std::vector<const Mention*> firsts;
    for (const auto& m : mentions) {
      bool seen = false;
      for (const auto* f : firsts) seen = seen || f->entity == m.entity;
      if (!seen) firsts.push_back(&m);
      if (firsts.size() > 2) return;
    }
    if (firsts.size() != 2) return;
    const Mention* a = firsts[0];
    const Mention* b = firsts[1];
    if (b->entity < a->entity) std::swap(a, b);
    if (auto r = kg.Linked(a->entity, b->entity)) {
      found[i] = Instance{s, *a, *b, *r, false};
    } else if (auto r2 = kg.Linked(b->entity, a->entity)) {
      found[i] = Instance{s, *b, *a, *r2, false};
    }
  });
  std::vector<Instance> out;
  for (auto& f : found) {
    if (f) out.push_back(std::move(*f));
  }
  return out;
}

size_t NegativeTarget(const std::vector<Instance>& positives, double ratio) {
  std::map<RelationId, std::set<Triple>> by_relation;
  for (const auto& p : positives) by_relation[p.label].insert(p.triple());
  size_t largest = 0;
  for (const auto& [r, triples] : by_relation) {
    largest = std::max(largest, triples.size());
  }
  return FloorFraction(ratio, largest);
}

std::vector<Instance> SampleNegatives(const std::vector<Instance>& positives,
                                      const KnowledgeGraph& kg, uint64_t seed,
                                      const NegativeSamplingOptions& options) {
  const size_t target = NegativeTarget(positives, options.ratio);
  std::vector<Instance> out;
  if (target == 0) return out;
  const std::vector<EntityId> entities = kg.EntityIds();
  Rng rng(seed);
  std::set<Triple> produced;
  const uint64_t max_attempts =
      static_cast<uint64_t>(options.attempts_per_target) * target;
  for (uint64_t attempt = 0; attempt < max_attempts && out.size() < target;
       ++attempt) {
    const Instance& src = positives[rng.UniformInt(positives.size())];
    const bool replace_head = rng.Bernoulli(0.5);
    const EntityId& fresh = entities[rng.UniformInt(entities.size())];
    const Mention& kept = replace_head ? src.tail : src.head;
    const Mention& replaced = replace_head ? src.head : src.tail;
    if (fresh == kept.entity || fresh == replaced.entity) continue;
    const EntityId& head = replace_head ? fresh : src.head.entity;
    const EntityId& tail = replace_head ? src.tail.entity : fresh;
    if (kg.Linked(head, tail)) continue;
    if (options.reject_reverse && kg.Linked(tail, head)) continue;
    Triple t{head, std::string(kNaRelation), tail};
    if (produced.contains(t)) continue;

    const auto& forms = kg.surface_forms().find(fresh)->second;
    const std::string& surface = forms[rng.UniformInt(forms.size())];
    Instance neg = src;
    neg.label = std::string(kNaRelation);
    neg.negative = true;
    std::string& text = neg.sentence.text;
    text.replace(replaced.start, replaced.end - replaced.start, surface);
    const long delta = static_cast<long>(surface.size()) -
                       static_cast<long>(replaced.end - replaced.start);
    Mention& new_mention = replace_head ? neg.head : neg.tail;
    Mention& other = replace_head ? neg.tail : neg.head;
    new_mention = {fresh, replaced.start, replaced.start + surface.size(),
                   surface};
    if (other.start > replaced.start) {
      other.start = static_cast<size_t>(static_cast<long>(other.start) + delta);
      other.end = static_cast<size_t>(static_cast<long>(other.end) + delta);
    }
    produced.insert(t);
    out.push_back(std::move(neg));
  }
  if (out.size() < target) {
    throw Error(ErrorCode::kInsufficientCandidates,
                "negative sampling reached " + std::to_string(out.size()) +
                    " of " + std::to_string(target) + " NA triples");
  }
  return out;
}

MarkedSentence InsertMarkers(const Instance& inst, int max_len) {
  const std::vector<Token> tokens = Tokenize(inst.sentence.text);
  auto inside = [](const Token& t, const Mention& m) {
    return t.start >= m.start && t.end <= m.end;
  };
  MarkedSentence out;
  MarkerPositions& pos = out.markers;
  pos = {-1, -1, -1, -1};
  auto& toks = out.tokens;
  const size_t n = tokens.size();
  for (size_t i = 0; i < n; ++i) {
    const Token& t = tokens[i];
    const bool in_head = inside(t, inst.head);
    const bool in_tail = inside(t, inst.tail);
    if (in_head && pos.e1_start < 0) {
      pos.e1_start = static_cast<int>(toks.size());
      toks.emplace_back(kHeadMarker);
    }
    if (in_tail && pos.e2_start < 0) {
      pos.e2_start = static_cast<int>(toks.size());
      toks.emplace_back(kTailMarker);
    }
    toks.push_back(t.text);
    const bool head_closes =
        in_head && (i + 1 == n || !inside(tokens[i + 1], inst.head));
    const bool tail_closes =
        in_tail && (i + 1 == n || !inside(tokens[i + 1], inst.tail));
    if (head_closes && pos.e1_end < 0) {
      pos.e1_end = static_cast<int>(toks.size());
      toks.emplace_back(kHeadMarker);
    }
    if (tail_closes && pos.e2_end < 0) {
      pos.e2_end = static_cast<int>(toks.size());
      toks.emplace_back(kTailMarker);
    }
  }
  if (pos.e1_start < 0 || pos.e1_end < 0 || pos.e2_start < 0 ||
      pos.e2_end < 0) {
    throw Error(ErrorCode::kInvalidSpan,
                "mention does not cover any token in: " + inst.sentence.text);
  }
  if (static_cast<int>(toks.size()) > max_len) {
    if (std::max({pos.e1_start, pos.e1_end, pos.e2_start, pos.e2_end}) >=
        max_len) {
      throw Error(ErrorCode::kMarkerTruncated,
                  "entity marker beyond token " + std::to_string(max_len));
    }
    toks.resize(static_cast<size_t>(max_len));
  }
  CheckMarkers(toks, pos);
  return out;
}

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kParse, "unknown split '" + std::string(name) + "'");
}

SplitAssignment MakeSplits(const std::vector<Instance>& instances,
                           uint64_t seed, const SplitOptions& options) {
  std::set<Triple> distinct;
  for (const auto& inst : instances) distinct.insert(inst.triple());
  const size_t n = distinct.size();
  if (n < 10) {
    throw Error(ErrorCode::kDegenerateSplits,
                "need at least 10 triples to split, got " + std::to_string(n));
  }
  std::vector<Triple> order(distinct.begin(), distinct.end());
  Rng rng(seed);
  rng.Shuffle(std::span<Triple>(order));
  const size_t n_test = FloorFraction(options.test_fraction, n);
  const size_t n_dev = FloorFraction(options.dev_fraction, n - n_test);

  SplitAssignment out;
  for (size_t i = 0; i < n; ++i) {
    Split s = i < n_test           ? Split::kTest
              : i < n_test + n_dev ? Split::kDev
                                   : Split::kTrain;
    out.triple_split.emplace(order[i], s);
  }

  // A sentence (by normalized text) may back triples in several splits;
  // such sentences are removed everywhere.
  std::unordered_map<std::string, std::set<Split>> sentence_splits;
  std::vector<std::string> keys;
  keys.reserve(instances.size());
  for (const auto& inst : instances) {
    keys.push_back(NormalizeText(inst.sentence.text));
    sentence_splits[keys.back()].insert(out.triple_split.at(inst.triple()));
  }
  out.instance_split.resize(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    const auto& splits = sentence_splits[keys[i]];
    if (splits.size() == 1) {
      out.instance_split[i] = *splits.begin();
    } else {
      ++out.dropped_instances;
    }
  }
  return out;
}

std::vector<Example> SelectSplit(std::span<const Example> examples,
                                 Split split) {
  std::vector<Example> out;
  for (const auto& e : examples) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

void WriteExamples(const std::vector<Example>& examples, std::ostream& out) {
  for (const auto& e : examples) {
    WriteJsonLine(out, {{"id", e.id},
                        {"doc_id", e.doc_id},
                        {"index", e.index},
                        {"tokens", e.tokens},
                        {"e1_start", e.markers.e1_start},
                        {"e1_end", e.markers.e1_end},
                        {"e2_start", e.markers.e2_start},
                        {"e2_end", e.markers.e2_end},
                        {"head_entity", e.head},
                        {"tail_entity", e.tail},
                        {"label", e.label},
                        {"split", SplitName(e.split)},
                        {"negative", e.negative}});
  }
}

std::vector<Example> ReadExamples(std::istream& in) {
  std::vector<Example> out;
  ForEachJsonLine(in, [&](const nlohmann::json& j, size_t line_no) {
    try {
      Example e;
      e.id = j.at("id").get<int64_t>();
      e.doc_id = j.at("doc_id").get<std::string>();
      e.index = j.at("index").get<int>();
      e.tokens = j.at("tokens").get<std::vector<std::string>>();
      e.markers = {j.at("e1_start").get<int>(), j.at("e1_end").get<int>(),
                   j.at("e2_start").get<int>(), j.at("e2_end").get<int>()};
      e.head = j.at("head_entity").get<std::string>();
      e.tail = j.at("tail_entity").get<std::string>();
      e.label = j.at("label").get<std::string>();
      e.split = ParseSplit(j.at("split").get<std::string>());
      e.negative = j.value("negative", false);
      CheckMarkers(e.tokens, e.markers);
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kParse, "instance line " +
                                         std::to_string(line_no) + ": " +
                                         ex.what());
    }
  });
  return out;
}

std::vector<Example> LoadExamples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ReadExamples(in);
}

}  // namespace amilkit
