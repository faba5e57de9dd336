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

#ifndef AMILKIT_KGSTORE_H_
#define AMILKIT_KGSTORE_H_

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace amilkit {

using EntityId = std::string;
using SemanticTypeId = std::string;
using RelationId = std::string;

// Label of the negative class. Never a graph edge label.
inline constexpr std::string_view kNaRelation = "NA";

// A directed fact triple (head, relation, tail).
struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

std::string TripleToString(const Triple& t);

// Directed labeled graph over typed entities with a surface-form lexicon.
// Immutable once built; concurrent readers need no synchronization.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Builder-style mutators used by the loader and the synthetic generator.
  // They do not enforce cross-record invariants; call Validate() afterwards.
  void AddEntity(const EntityId& id, const SemanticTypeId& type,
                 std::vector<SemanticTypeId> extra_types = {});
  void AddSurfaceForm(const EntityId& id, std::string form);
  void AddEdge(const Triple& edge);

  // Throws Error on dangling endpoints, entities without a surface form,
  // surface forms for undeclared entities, or NA edge labels.
  void Validate() const;

  bool HasEntity(std::string_view id) const;
  const SemanticTypeId& TypeOf(std::string_view id) const;

  // Relation of the edge (head, r, tail); the lexicographically smallest r
  // when several exist. Absent when only the reverse edge is present.
  std::optional<RelationId> Linked(std::string_view head,
                                   std::string_view tail) const;
  bool LinkedEitherWay(std::string_view a, std::string_view b) const;

  const std::map<EntityId, SemanticTypeId, std::less<>>& entity_types() const {
    return type_of_;
  }
  const std::map<EntityId, std::vector<std::string>, std::less<>>&
  surface_forms() const {
    return surface_forms_;
  }
  const std::map<EntityId, std::vector<SemanticTypeId>, std::less<>>&
  ignored_types() const {
    return ignored_types_;
  }
  const std::set<Triple>& edges() const { return edges_; }
  size_t num_entities() const { return type_of_.size(); }

  // Entity ids in sorted order.
  std::vector<EntityId> EntityIds() const;
  std::set<RelationId> Relations() const;

  bool operator==(const KnowledgeGraph& other) const;

 private:
  std::map<EntityId, SemanticTypeId, std::less<>> type_of_;
  std::map<EntityId, std::vector<SemanticTypeId>, std::less<>> ignored_types_;
  std::map<EntityId, std::vector<std::string>, std::less<>> surface_forms_;
  std::set<Triple> edges_;
  std::map<std::pair<EntityId, EntityId>, std::set<RelationId>> by_pair_;
};

// TSV with tagged records: `E id type [extra types...]`, `S id form`,
// `R head relation tail`. Lines starting with '#' and blank lines are skipped.
KnowledgeGraph ParseKg(std::istream& in);
KnowledgeGraph LoadKg(const std::filesystem::path& path);
void WriteKg(const KnowledgeGraph& kg, std::ostream& out);
void SaveKg(const KnowledgeGraph& kg, const std::filesystem::path& path);

// Copy of `kg` without edges whose relation is in `excluded`.
KnowledgeGraph FilterRelations(const KnowledgeGraph& kg,
                               const std::set<RelationId>& excluded);

}  // namespace amilkit

#endif  // AMILKIT_KGSTORE_H_
