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

#include "amilkit/textpipe.h"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "amilkit/error.h"
#include "amilkit/jsonl.h"
#include "amilkit/parallel.h"

namespace amilkit {
namespace {

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "Fig.", "Figs.", "fig.", "al.",   "vs.",  "e.g.", "i.e.", "etc.",
    "cf.",  "Dr.",   "Mr.",  "Mrs.",  "Ms.",  "Prof.", "No.",  "Eq.",
    "Eqs.", "approx.", "ca.", "resp.", "Ref.", "Refs.", "St.", "Jr."};

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsUpper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool IsDigit(unsigned char c) { return c >= '0' && c <= '9'; }

unsigned char FoldByte(unsigned char c) {
  if (IsUpper(c)) return static_cast<unsigned char>(c - 'A' + 'a');
  if (IsSpace(c)) return ' ';
  return c;
}

std::string_view Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool IsOpener(unsigned char c) {
  return c == '(' || c == '[' || c == '{' || c == '"' || c == '\'';
}

// `period` indexes a '.' in `text`; true if the word it closes must not end
// a sentence. A lone capital ("J.") counts as an initial unless the next
// word is a bare capital letter, as in "A treats B. C causes D.".
bool IsAbbreviation(std::string_view text, size_t period) {
  size_t start = period;
  while (start > 0 && !IsSpace(text[start - 1])) --start;
  while (start < period && IsOpener(text[start])) ++start;
  std::string_view word = text.substr(start, period + 1 - start);
  if (word.size() == 2 && IsUpper(word[0])) {
    size_t next = period + 1;
    while (next < text.size() && IsSpace(text[next])) ++next;
    const bool bare_capital =
        next < text.size() && IsUpper(text[next]) &&
        (next + 1 == text.size() || IsSpace(text[next + 1]));
    return !bare_capital;
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

}  // namespace

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || IsUpper(c) || IsDigit(c) || c >= 0x80;
}

std::string NormalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(FoldByte(c)));
  }
  return out;
}

std::vector<Sentence> Segment(const Document& doc) {
  std::vector<Sentence> out;
  std::string_view text = doc.text;
  auto emit = [&](size_t from, size_t to) {
    std::string_view piece = Trim(text.substr(from, to - from));
    if (!piece.empty()) {
      out.push_back({doc.doc_id, static_cast<int>(out.size()),
                     std::string(piece)});
    }
  };
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    size_t j = i + 1;
    if (j >= text.size() || !IsSpace(text[j])) continue;
    while (j < text.size() && IsSpace(text[j])) ++j;
    if (j >= text.size()) continue;
    const auto next = static_cast<unsigned char>(text[j]);
    if (!IsUpper(next) && !IsDigit(next)) continue;
    if (c == '.' && IsAbbreviation(text, i)) continue;
    emit(start, i + 1);
    start = j;
    i = j - 1;
  }
  emit(start, text.size());
  return out;
}

std::vector<Sentence> Dedupe(const std::vector<Sentence>& sentences) {
  std::unordered_set<std::string> seen;
  std::vector<Sentence> out;
  for (const auto& s : sentences) {
    if (seen.insert(NormalizeText(s.text)).second) out.push_back(s);
  }
  return out;
}

int32_t DictionaryMatcher::Child(int32_t node, unsigned char c) const {
  auto it = edges_.find((static_cast<uint64_t>(node) << 8) | c);
  return it == edges_.end() ? -1 : it->second;
}

DictionaryMatcher DictionaryMatcher::Build(const KnowledgeGraph& kg) {
  DictionaryMatcher m;
  m.nodes_.push_back({});
  std::unordered_map<std::string, size_t> pattern_index;
  for (const auto& [entity, forms] : kg.surface_forms()) {
    for (const auto& form : forms) {
      std::string pattern = NormalizeText(form);
      if (pattern.empty()) continue;
      auto [it, inserted] = pattern_index.emplace(pattern, m.patterns_.size());
      if (!inserted) {
        const EntityId& other = m.entities_[it->second];
        if (other != entity) {
          throw Error(ErrorCode::kAmbiguousSurfaceForm,
                      "surface form '" + pattern + "' registered for both " +
                          other + " and " + entity);
        }
        continue;
      }
      const auto pid = static_cast<int32_t>(m.patterns_.size());
      m.patterns_.push_back(pattern);
      m.entities_.push_back(entity);
      int32_t node = 0;
      for (unsigned char c : pattern) {
        const uint64_t key = (static_cast<uint64_t>(node) << 8) | c;
        auto edge = m.edges_.find(key);
        if (edge == m.edges_.end()) {
          const auto child = static_cast<int32_t>(m.nodes_.size());
          m.nodes_.push_back({0, -1, -1, m.nodes_[node].depth + 1});
          m.edges_.emplace(key, child);
          node = child;
        } else {
          node = edge->second;
        }
      }
      m.nodes_[node].pattern = pid;
    }
  }

  // Breadth-first failure links. Children are discovered by scanning the
  // edge table once and bucketing by parent.
  std::vector<std::vector<std::pair<unsigned char, int32_t>>> children(
      m.nodes_.size());
  for (const auto& [key, child] : m.edges_) {
    children[key >> 8].emplace_back(static_cast<unsigned char>(key & 0xff),
                                    child);
  }
  std::deque<int32_t> queue;
  for (const auto& [c, child] : children[0]) queue.push_back(child);
  while (!queue.empty()) {
    const int32_t u = queue.front();
    queue.pop_front();
    for (const auto& [c, v] : children[u]) {
      int32_t f = m.nodes_[u].fail;
      int32_t target = m.Child(f, c);
      while (target < 0 && f != 0) {
        f = m.nodes_[f].fail;
        target = m.Child(f, c);
      }
      m.nodes_[v].fail = (target >= 0 && target != v) ? target : 0;
      const Node& fail = m.nodes_[m.nodes_[v].fail];
      m.nodes_[v].output_link =
          fail.pattern >= 0 ? m.nodes_[v].fail : fail.output_link;
      queue.push_back(v);
    }
  }
  return m;
}

std::vector<Mention> DictionaryMatcher::FindMentions(
    std::string_view text) const {
  struct Candidate {
    size_t start, end;
    int32_t pattern;
  };
  // Scan a folded copy with whitespace runs collapsed to one space; `origin`
  // maps each folded byte back to its offset in `text`.
  std::string folded;
  std::vector<size_t> origin;
  folded.reserve(text.size());
  origin.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = FoldByte(static_cast<unsigned char>(text[i]));
    if (c == ' ' && !folded.empty() && folded.back() == ' ') continue;
    folded.push_back(static_cast<char>(c));
    origin.push_back(i);
  }
  std::vector<Candidate> candidates;
  const size_t n = folded.size();
  int32_t state = 0;
  for (size_t i = 0; i < n; ++i) {
    const unsigned char c = static_cast<unsigned char>(folded[i]);
    int32_t next = Child(state, c);
    while (next < 0 && state != 0) {
      state = nodes_[state].fail;
      next = Child(state, c);
    }
    state = next < 0 ? 0 : next;
    const size_t end = i + 1;
    if (end < n && IsWordByte(static_cast<unsigned char>(folded[end]))) continue;
    for (int32_t node = nodes_[state].pattern >= 0 ? state
                                                   : nodes_[state].output_link;
         node >= 0; node = nodes_[node].output_link) {
      const size_t start = end - static_cast<size_t>(nodes_[node].depth);
      if (start > 0 && IsWordByte(static_cast<unsigned char>(folded[start - 1]))) {
        continue;
      }
      candidates.push_back({origin[start], origin[end - 1] + 1, nodes_[node].pattern});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.start != b.start) return a.start < b.start;
              return a.end > b.end;
            });
  std::vector<Mention> out;
  size_t cursor = 0;
  for (const auto& cand : candidates) {
    if (cand.start < cursor) continue;
    out.push_back({entities_[cand.pattern], cand.start, cand.end,
                   std::string(text.substr(cand.start, cand.end - cand.start))});
    cursor = cand.end;
  }
  return out;
}

std::vector<Document> ReadCorpus(std::istream& in) {
  std::vector<Document> docs;
  ForEachJsonLine(in, [&](const nlohmann::json& j, size_t line_no) {
    if (!j.contains("doc_id") || !j.contains("text") ||
        !j["doc_id"].is_string() || !j["text"].is_string()) {
      throw Error(ErrorCode::kParse, "corpus line " + std::to_string(line_no) +
                                         ": expected {\"doc_id\",\"text\"}");
    }
    docs.push_back({j["doc_id"].get<std::string>(), j["text"].get<std::string>()});
  });
  return docs;
}

std::vector<Document> LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ReadCorpus(in);
}

void WriteCorpus(const std::vector<Document>& docs, std::ostream& out) {
  for (const auto& d : docs) {
    WriteJsonLine(out, {{"doc_id", d.doc_id}, {"text", d.text}});
  }
}

void WriteSentences(const std::vector<Sentence>& sentences, std::ostream& out) {
  for (const auto& s : sentences) {
    WriteJsonLine(out,
                  {{"doc_id", s.doc_id}, {"index", s.index}, {"text", s.text}});
  }
}

std::vector<Sentence> ReadSentences(std::istream& in) {
  std::vector<Sentence> out;
  ForEachJsonLine(in, [&](const nlohmann::json& j, size_t) {
    out.push_back({j.at("doc_id").get<std::string>(), j.at("index").get<int>(),
                   j.at("text").get<std::string>()});
  });
  return out;
}

std::vector<Sentence> SegmentCorpus(const std::vector<Document>& docs,
                                    int workers) {
  std::vector<std::vector<Sentence>> per_doc(docs.size());
  ParallelFor(docs.size(), workers,
              [&](size_t i) { per_doc[i] = Segment(docs[i]); });
  std::vector<Sentence> all;
  for (auto& v : per_doc) {
    for (auto& s : v) all.push_back(std::move(s));
  }
  return all;
}

}  // namespace amilkit
