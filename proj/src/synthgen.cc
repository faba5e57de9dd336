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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <utility>

#include "amilkit/error.h"
#include "amilkit/jsonl.h"

namespace amilkit {
namespace {

constexpr std::array<const char*, 12> kHeadNouns = {
    "protein", "gene",     "organ",    "syndrome", "compound", "cell",
    "tissue",  "enzyme",   "virus",    "receptor", "hormone",  "bacterium"};

struct Verb {
  const char* present;
  const char* participle;
};

constexpr std::array<Verb, 24> kVerbs = {{
    {"treats", "treated"},         {"inhibits", "inhibited"},
    {"activates", "activated"},    {"causes", "caused"},
    {"prevents", "prevented"},     {"regulates", "regulated"},
    {"binds", "bound"},            {"cleaves", "cleaved"},
    {"degrades", "degraded"},      {"encodes", "encoded"},
    {"stimulates", "stimulated"},  {"suppresses", "suppressed"},
    {"transports", "transported"}, {"modulates", "modulated"},
    {"induces", "induced"},        {"blocks", "blocked"},
    {"targets", "targeted"},       {"metabolizes", "metabolized"},
    {"phosphorylates", "phosphorylated"},
    {"secretes", "secreted"},      {"absorbs", "absorbed"},
    {"diagnoses", "diagnosed"},    {"complicates", "complicated"},
    {"precedes", "preceded"},
}};

constexpr std::array<const char*, 5> kAdverbs = {"", "strongly", "weakly",
                                                 "directly", "partially"};

constexpr const char* kConsonants = "bdfgklmnprstvz";
constexpr const char* kVowels = "aeiou";
constexpr uint64_t kSyllables = 14 * 5;
constexpr uint64_t kNameSpace = kSyllables * kSyllables * kSyllables;

std::string TypeId(int k) { return "T" + std::to_string(k); }

std::string HeadNoun(int k) {
  std::string noun = kHeadNouns[static_cast<size_t>(k) % kHeadNouns.size()];
  if (k >= static_cast<int>(kHeadNouns.size())) {
    noun += std::to_string(k / static_cast<int>(kHeadNouns.size()));
  }
  return noun;
}

// Three consonant-vowel syllables and a trailing "x". The multiplier is
// coprime with the name space, so distinct indices give distinct names.
std::string PseudoWord(uint64_t i) {
  uint64_t x = (i * 7919 + 12345) % kNameSpace;
  std::string word;
  for (int s = 0; s < 3; ++s) {
    const uint64_t syl = x % kSyllables;
    x /= kSyllables;
    word += kConsonants[syl / 5];
    word += kVowels[syl % 5];
  }
  word += 'x';
  return word;
}

struct RelationText {
  std::string id;
  std::string active;   // "<adverb> inhibits"
  std::string passive;  // "<adverb> inhibited"
};

RelationText RelationFor(int r) {
  const Verb& v = kVerbs[static_cast<size_t>(r) % kVerbs.size()];
  const size_t a = static_cast<size_t>(r) / kVerbs.size();
  RelationText out{v.present, v.present, v.participle};
  if (a > 0) {
    out.id = std::string(v.present) + "_" + kAdverbs[a];
    out.active = std::string(kAdverbs[a]) + " " + v.present;
    out.passive = std::string(kAdverbs[a]) + " " + v.participle;
  }
  return out;
}

const std::string& RandomForm(const KnowledgeGraph& kg, const EntityId& id,
                              Rng& rng) {
  const auto& forms = kg.surface_forms().find(id)->second;
  return forms[static_cast<size_t>(rng.UniformInt(forms.size()))];
}

void CheckPositive(int value, const char* name) {
  if (value <= 0) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(name) + " must be positive");
  }
}

}  // namespace

void SynthConfig::Validate() const {
  CheckPositive(n_types, "n_types");
  CheckPositive(entities_per_type, "entities_per_type");
  CheckPositive(n_relations, "n_relations");
  CheckPositive(n_triples, "n_triples");
  CheckPositive(max_support, "max_support");
  CheckPositive(sentences_per_doc, "sentences_per_doc");
  if (!(pareto_alpha > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "pareto_alpha must be positive");
  }
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "noise_rate must be in [0, 1)");
  }
  if (!(distractor_rate >= 0.0 && distractor_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "distractor_rate must be in [0, 1]");
  }
  if (static_cast<size_t>(n_relations) > kVerbs.size() * kAdverbs.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "at most " + std::to_string(kVerbs.size() * kAdverbs.size()) +
                    " relations are supported");
  }
  if (static_cast<uint64_t>(n_types) * static_cast<uint64_t>(entities_per_type) >
      kNameSpace) {
    throw Error(ErrorCode::kInvalidConfig, "too many entities");
  }
}

nlohmann::json SynthConfig::ToJson() const {
  return {{"n_types", n_types},
          {"entities_per_type", entities_per_type},
          {"n_relations", n_relations},
          {"n_triples", n_triples},
          {"pareto_alpha", pareto_alpha},
          {"max_support", max_support},
          {"noise_rate", noise_rate},
          {"distractor_rate", distractor_rate},
          {"sentences_per_doc", sentences_per_doc},
          {"seed", seed}};
}

SynthConfig SynthConfig::FromJson(const nlohmann::json& j) {
  SynthConfig c;
  try {
    c.n_types = j.value("n_types", c.n_types);
    c.entities_per_type = j.value("entities_per_type", c.entities_per_type);
    c.n_relations = j.value("n_relations", c.n_relations);
    c.n_triples = j.value("n_triples", c.n_triples);
    c.pareto_alpha = j.value("pareto_alpha", c.pareto_alpha);
    c.max_support = j.value("max_support", c.max_support);
    c.noise_rate = j.value("noise_rate", c.noise_rate);
    c.distractor_rate = j.value("distractor_rate", c.distractor_rate);
    c.sentences_per_doc = j.value("sentences_per_doc", c.sentences_per_doc);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("synth config: ") + e.what());
  }
  c.Validate();
  return c;
}

std::string_view SentenceKindName(SentenceKind kind) {
  switch (kind) {
    case SentenceKind::kRelational:
      return "relational";
    case SentenceKind::kNoise:
      return "noise";
    case SentenceKind::kDistractor:
      return "distractor";
  }
  return "unknown";
}

int SampleSupport(double alpha, int cap, Rng& rng) {
  const double u = 1.0 - rng.UniformDouble();  // (0, 1]
  const double x = std::pow(u, -1.0 / alpha) - 1.0;
  if (!(x < static_cast<double>(cap))) return cap;
  return std::min(cap, 1 + static_cast<int>(std::floor(x)));
}

KnowledgeGraph GenKg(const SynthConfig& config) {
  config.Validate();
  const int n_entities = config.n_types * config.entities_per_type;
  const uint64_t pairs =
      static_cast<uint64_t>(n_entities) * static_cast<uint64_t>(n_entities - 1) / 2;
  if (static_cast<uint64_t>(config.n_triples) > pairs) {
    throw Error(ErrorCode::kInvalidConfig,
                std::to_string(config.n_triples) + " triples requested but only " +
                    std::to_string(pairs) + " entity pairs exist");
  }
  Rng rng(DeriveSeed(config.seed, 0, "kg"));
  KnowledgeGraph kg;
  std::vector<std::vector<EntityId>> by_type(static_cast<size_t>(config.n_types));
  for (int i = 0; i < n_entities; ++i) {
    const int type = i % config.n_types;
    const EntityId id = "e" + std::to_string(i);
    const std::string word = PseudoWord(static_cast<uint64_t>(i));
    kg.AddEntity(id, TypeId(type));
    kg.AddSurfaceForm(id, word + " " + HeadNoun(type));
    if (i % 4 == 3) kg.AddSurfaceForm(id, word);
    by_type[static_cast<size_t>(type)].push_back(id);
  }

  std::vector<std::pair<int, int>> signature;
  for (int r = 0; r < config.n_relations; ++r) {
    signature.emplace_back(static_cast<int>(rng.UniformInt(config.n_types)),
                           static_cast<int>(rng.UniformInt(config.n_types)));
  }

  std::set<std::pair<EntityId, EntityId>> used;  // unordered pairs
  const uint64_t max_attempts = 1000ULL * static_cast<uint64_t>(config.n_triples);
  uint64_t attempts = 0;
  for (int t = 0; t < config.n_triples; ++t) {
    const int r = t % config.n_relations;
    const auto& heads = by_type[static_cast<size_t>(signature[r].first)];
    const auto& tails = by_type[static_cast<size_t>(signature[r].second)];
    while (true) {
      if (++attempts > max_attempts) {
        throw Error(ErrorCode::kInvalidConfig,
                    "could not place " + std::to_string(config.n_triples) +
                        " distinct triples under the relation signatures");
      }
      const EntityId& h = heads[static_cast<size_t>(rng.UniformInt(heads.size()))];
      const EntityId& tl = tails[static_cast<size_t>(rng.UniformInt(tails.size()))];
      if (h == tl) continue;
      auto key = std::minmax(h, tl);
      if (!used.emplace(key.first, key.second).second) continue;
      kg.AddEdge({h, RelationFor(r).id, tl});
      break;
    }
  }
  kg.Validate();
  return kg;
}

SynthCorpus GenCorpus(const SynthConfig& config, const KnowledgeGraph& kg) {
  config.Validate();
  Rng rng(DeriveSeed(config.seed, 0, "corpus"));
  std::map<RelationId, RelationText> texts;
  for (int r = 0; r < config.n_relations; ++r) {
    RelationText t = RelationFor(r);
    texts.emplace(t.id, t);
  }
  const std::vector<EntityId> entities = kg.EntityIds();

  SynthCorpus out;
  std::vector<GoldSentence> sentences;
  long counter = 0;
  auto form = [&](const EntityId& id) { return RandomForm(kg, id, rng); };

  for (const Triple& edge : kg.edges()) {
    auto text_it = texts.find(edge.relation);
    if (text_it == texts.end()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "relation " + edge.relation + " was not generated by this config");
    }
    const RelationText& rt = text_it->second;
    const int support = SampleSupport(config.pareto_alpha, config.max_support, rng);
    out.support[edge] = support;
    for (int s = 0; s < support; ++s) {
      GoldSentence g;
      g.head = edge.head;
      g.tail = edge.tail;
      g.relation = edge.relation;
      const std::string n = std::to_string(++counter);
      const std::string h = form(edge.head);
      const std::string t = form(edge.tail);
      if (rng.Bernoulli(config.noise_rate)) {
        g.kind = SentenceKind::kNoise;
        g.intended_label = kNaRelation;
        const bool swap = rng.Bernoulli(0.5);
        const std::string& a = swap ? t : h;
        const std::string& b = swap ? h : t;
        if (rng.Bernoulli(0.5)) {
          g.text = "In cohort " + n + ", " + a + " was mentioned near " + b + ".";
        } else {
          g.text = "Study " + n + " listed " + a + " alongside " + b + ".";
        }
      } else {
        g.kind = SentenceKind::kRelational;
        g.intended_label = edge.relation;
        switch (rng.UniformInt(4)) {
          case 0:
            g.text = "In cohort " + n + ", " + h + " " + rt.active + " " + t + ".";
            break;
          case 1:
            g.text = "Study " + n + " found that " + h + " " + rt.active + " " + t + ".";
            break;
          case 2:
            g.text = "In cohort " + n + ", " + t + " is " + rt.passive + " by " + h + ".";
            break;
          default:
            g.text = "Report " + n + " shows that " + t + " was " + rt.passive +
                     " by " + h + ".";
            break;
        }
      }
      sentences.push_back(std::move(g));

      if (rng.Bernoulli(config.distractor_rate) && entities.size() > 2) {
        EntityId third;
        do {
          third = entities[static_cast<size_t>(rng.UniformInt(entities.size()))];
        } while (third == edge.head || third == edge.tail);
        GoldSentence d;
        d.head = edge.head;
        d.tail = edge.tail;
        d.relation = edge.relation;
        d.kind = SentenceKind::kDistractor;
        d.intended_label = kNaRelation;
        d.text = "In cohort " + std::to_string(++counter) + ", " + form(edge.head) +
                 " " + rt.active + " " + form(edge.tail) + " and " + form(third) +
                 ".";
        sentences.push_back(std::move(d));
      }
    }
  }

  rng.Shuffle(std::span<GoldSentence>(sentences));
  const size_t per_doc = static_cast<size_t>(config.sentences_per_doc);
  for (size_t from = 0; from < sentences.size(); from += per_doc) {
    char doc_id[32];
    std::snprintf(doc_id, sizeof(doc_id), "doc%05zu", from / per_doc);
    Document doc{doc_id, ""};
    const size_t to = std::min(sentences.size(), from + per_doc);
    for (size_t i = from; i < to; ++i) {
      sentences[i].doc_id = doc_id;
      sentences[i].index = static_cast<int>(i - from);
      if (i > from) doc.text += ' ';
      doc.text += sentences[i].text;
    }
    out.documents.push_back(std::move(doc));
  }
  out.gold = std::move(sentences);
  return out;
}

void WriteGold(const std::vector<GoldSentence>& gold, std::ostream& out) {
  for (const auto& g : gold) {
    WriteJsonLine(out, {{"doc_id", g.doc_id},
                        {"index", g.index},
                        {"text", g.text},
                        {"head", g.head},
                        {"tail", g.tail},
                        {"relation", g.relation},
                        {"kind", std::string(SentenceKindName(g.kind))},
                        {"label", g.intended_label}});
  }
}

}  // namespace amilkit
