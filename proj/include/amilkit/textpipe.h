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

#ifndef AMILKIT_TEXTPIPE_H_
#define AMILKIT_TEXTPIPE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "amilkit/kgstore.h"

namespace amilkit {

struct Document {
  std::string doc_id;
  std::string text;
};

struct Sentence {
  std::string doc_id;
  int index = 0;
  std::string text;

  bool operator==(const Sentence&) const = default;
};

// A dictionary hit. Offsets are byte offsets into the sentence text;
// `end` is exclusive.
struct Mention {
  EntityId entity;
  size_t start = 0;
  size_t end = 0;
  std::string surface;

  bool operator==(const Mention&) const = default;
};

// ASCII case folding plus whitespace collapsing and trimming.
std::string NormalizeText(std::string_view text);

// Rule-based sentence splitter. A boundary is a '.', '!' or '?' followed by
// whitespace and then an uppercase letter or digit, unless the period ends a
// single capital letter ("E.") or a known abbreviation ("Fig.", "al.", ...).
std::vector<Sentence> Segment(const Document& doc);

// Keeps the first occurrence of each normalized sentence text.
std::vector<Sentence> Dedupe(const std::vector<Sentence>& sentences);

// Aho-Corasick automaton over the normalized surface forms of a graph.
class DictionaryMatcher {
 public:
  // Throws kAmbiguousSurfaceForm if one normalized form maps to two entities.
  static DictionaryMatcher Build(const KnowledgeGraph& kg);

  // Case-insensitive, leftmost-longest, non-overlapping matches whose
  // neighbours are not letters or digits. Sorted by start.
  std::vector<Mention> FindMentions(std::string_view text) const;
  std::vector<Mention> FindMentions(const Sentence& s) const {
    return FindMentions(s.text);
  }

  size_t num_patterns() const { return patterns_.size(); }
  const std::vector<std::string>& patterns() const { return patterns_; }
  const std::vector<EntityId>& pattern_entities() const { return entities_; }

 private:
  struct Node {
    int32_t fail = 0;
    int32_t pattern = -1;      // pattern ending exactly here
    int32_t output_link = -1;  // nearest proper suffix node with a pattern
    int32_t depth = 0;
  };

  int32_t Child(int32_t node, unsigned char c) const;

  std::vector<Node> nodes_;
  // (node << 8 | byte) -> child node.
  std::unordered_map<uint64_t, int32_t> edges_;
  std::vector<std::string> patterns_;
  std::vector<EntityId> entities_;
};

// True for ASCII letters/digits and any non-ASCII byte.
bool IsWordByte(unsigned char c);

// JSON-lines {"doc_id","text"}.
std::vector<Document> ReadCorpus(std::istream& in);
std::vector<Document> LoadCorpus(const std::filesystem::path& path);
void WriteCorpus(const std::vector<Document>& docs, std::ostream& out);

// JSON-lines {"doc_id","index","text"}.
void WriteSentences(const std::vector<Sentence>& sentences, std::ostream& out);
std::vector<Sentence> ReadSentences(std::istream& in);

// Segments every document; see Dedupe for removing repeats. Work is split across
// `workers` threads; output order is by (document order, index) regardless.
std::vector<Sentence> SegmentCorpus(const std::vector<Document>& docs,
                                    int workers);

}  // namespace amilkit

#endif  // AMILKIT_TEXTPIPE_H_
