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

#include "amilkit/kgstore.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "amilkit/error.h"

namespace amilkit {
namespace {

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

[[noreturn]] void ParseFail(size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse,
              "kg line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string TripleToString(const Triple& t) {
  return t.head + "\t" + t.relation + "\t" + t.tail;
}

void KnowledgeGraph::AddEntity(const EntityId& id, const SemanticTypeId& type,
                               std::vector<SemanticTypeId> extra_types) {
  type_of_[id] = type;
  if (!extra_types.empty()) ignored_types_[id] = std::move(extra_types);
}

void KnowledgeGraph::AddSurfaceForm(const EntityId& id, std::string form) {
  auto& forms = surface_forms_[id];
  for (const auto& f : forms) {
    if (f == form) return;
  }
  forms.push_back(std::move(form));
}

void KnowledgeGraph::AddEdge(const Triple& edge) {
  if (edges_.insert(edge).second) {
    by_pair_[{edge.head, edge.tail}].insert(edge.relation);
  }
}

void KnowledgeGraph::Validate() const {
  for (const auto& e : edges_) {
    if (e.relation == kNaRelation) {
      throw Error(ErrorCode::kParse, "NA is reserved and cannot label an edge");
    }
    for (const auto* end : {&e.head, &e.tail}) {
      if (!type_of_.contains(*end)) {
        throw Error(ErrorCode::kDanglingEndpoint,
                    "edge " + TripleToString(e) + " references unknown entity " +
                        *end);
      }
    }
  }
  for (const auto& [id, forms] : surface_forms_) {
    if (!type_of_.contains(id)) {
      throw Error(ErrorCode::kMissingType,
                  "entity " + id + " has surface forms but no type record");
    }
  }
  for (const auto& [id, type] : type_of_) {
    auto it = surface_forms_.find(id);
    if (it == surface_forms_.end() || it->second.empty()) {
      throw Error(ErrorCode::kMissingSurfaceForm,
                  "entity " + id + " has no surface form");
    }
  }
}

bool KnowledgeGraph::HasEntity(std::string_view id) const {
  return type_of_.find(id) != type_of_.end();
}

const SemanticTypeId& KnowledgeGraph::TypeOf(std::string_view id) const {
  auto it = type_of_.find(id);
  if (it == type_of_.end()) {
    throw Error(ErrorCode::kUnknownEntity,
                "unknown entity " + std::string(id));
  }
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::Linked(std::string_view head,
                                                 std::string_view tail) const {
  for (auto id : {head, tail}) {
    if (!HasEntity(id)) {
      throw Error(ErrorCode::kUnknownEntity,
                  "unknown entity " + std::string(id));
    }
  }
  auto it = by_pair_.find({std::string(head), std::string(tail)});
  if (it == by_pair_.end()) return std::nullopt;
  return *it->second.begin();
}

bool KnowledgeGraph::LinkedEitherWay(std::string_view a,
                                     std::string_view b) const {
  return Linked(a, b).has_value() || Linked(b, a).has_value();
}

std::vector<EntityId> KnowledgeGraph::EntityIds() const {
  std::vector<EntityId> ids;
  ids.reserve(type_of_.size());
  for (const auto& [id, type] : type_of_) ids.push_back(id);
  return ids;
}

std::set<RelationId> KnowledgeGraph::Relations() const {
  std::set<RelationId> out;
  for (const auto& e : edges_) out.insert(e.relation);
  return out;
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
  return type_of_ == other.type_of_ && surface_forms_ == other.surface_forms_ &&
         edges_ == other.edges_ && ignored_types_ == other.ignored_types_;
}

KnowledgeGraph ParseKg(std::istream& in) {
  KnowledgeGraph kg;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = SplitTabs(line);
    const std::string& tag = fields[0];
    if (tag == "E") {
      if (fields.size() < 3 || fields[1].empty() || fields[2].empty()) {
        ParseFail(line_no, "E record needs an entity id and a semantic type");
      }
      std::vector<SemanticTypeId> extra(fields.begin() + 3, fields.end());
      kg.AddEntity(fields[1], fields[2], std::move(extra));
    } else if (tag == "S") {
      if (fields.size() != 3 || fields[1].empty() || fields[2].empty()) {
        ParseFail(line_no, "S record needs an entity id and a surface form");
      }
      kg.AddSurfaceForm(fields[1], fields[2]);
    } else if (tag == "R") {
      if (fields.size() != 4 || fields[1].empty() || fields[2].empty() ||
          fields[3].empty()) {
        ParseFail(line_no, "R record needs head, relation and tail");
      }
      if (fields[2] == kNaRelation) {
        ParseFail(line_no, "NA is reserved and cannot label an edge");
      }
      kg.AddEdge({fields[1], fields[2], fields[3]});
    } else {
      ParseFail(line_no, "unknown record tag '" + tag + "'");
    }
  }
  kg.Validate();
  return kg;
}

KnowledgeGraph LoadKg(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ParseKg(in);
}

void WriteKg(const KnowledgeGraph& kg, std::ostream& out) {
  for (const auto& [id, type] : kg.entity_types()) {
    out << "E\t" << id << '\t' << type;
    auto extra = kg.ignored_types().find(id);
    if (extra != kg.ignored_types().end()) {
      for (const auto& t : extra->second) out << '\t' << t;
    }
    out << '\n';
  }
  for (const auto& [id, forms] : kg.surface_forms()) {
    for (const auto& f : forms) out << "S\t" << id << '\t' << f << '\n';
  }
  for (const auto& e : kg.edges()) {
    out << "R\t" << e.head << '\t' << e.relation << '\t' << e.tail << '\n';
  }
}

void SaveKg(const KnowledgeGraph& kg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteKg(kg, out);
}

KnowledgeGraph FilterRelations(const KnowledgeGraph& kg,
                               const std::set<RelationId>& excluded) {
  KnowledgeGraph out;
  for (const auto& [id, type] : kg.entity_types()) {
    auto extra = kg.ignored_types().find(id);
    out.AddEntity(id, type,
                  extra == kg.ignored_types().end()
                      ? std::vector<SemanticTypeId>{}
                      : extra->second);
  }
  for (const auto& [id, forms] : kg.surface_forms()) {
    for (const auto& f : forms) out.AddSurfaceForm(id, f);
  }
  for (const auto& e : kg.edges()) {
    if (!excluded.contains(e.relation)) out.AddEdge(e);
  }
  return out;
}

}  // namespace amilkit
