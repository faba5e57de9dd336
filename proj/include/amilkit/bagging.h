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

#ifndef AMILKIT_BAGGING_H_
#define AMILKIT_BAGGING_H_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amilkit/distsup.h"
#include "amilkit/kgstore.h"
#include "json.hpp"

namespace amilkit {

inline constexpr int kDefaultBagSize = 16;

enum class BagMode { kPair, kType };
std::string_view BagModeName(BagMode mode);
BagMode ParseBagMode(std::string_view name);

// Pair keys hold entity ids, type keys hold semantic type ids.
struct BagKey {
  BagMode mode = BagMode::kPair;
  std::string first;
  RelationId relation;
  std::string second;

  auto operator<=>(const BagKey&) const = default;
  bool operator==(const BagKey&) const = default;

  std::string ToString() const;
  nlohmann::json ToJson() const;
};

BagKey KeyFor(const Example& e, BagMode mode, const KnowledgeGraph& kg);

// Members index into the example list the bag was built from. The
// constituent pairs are the distinct (head, tail) entity pairs among the
// members and drive de-abstraction at evaluation time.
struct Bag {
  BagKey key;
  std::vector<size_t> members;
  int distinct_count = 0;
  std::set<std::pair<EntityId, EntityId>> constituents;
};

// Key -> indices of `examples`, in input order.
std::map<BagKey, std::vector<size_t>> Group(std::span<const Example> examples,
                                            BagMode mode,
                                            const KnowledgeGraph& kg);

// Shuffles `indices` with `seed` and chunks them into ceil(n/bag_size) bags.
// A short chunk is topped up by sampling its own members uniformly with
// replacement.
std::vector<Bag> Fill(const BagKey& key, std::span<const size_t> indices,
                      std::span<const Example> examples, int bag_size,
                      uint64_t seed);

// Group + Fill over every key. Each key draws from its own stream seeded by
// DeriveSeed(seed, epoch, key), so the result does not depend on key order.
std::vector<Bag> BuildBags(std::span<const Example> examples, BagMode mode,
                           const KnowledgeGraph& kg, int bag_size,
                           uint64_t seed, uint64_t epoch = 0);

struct DuplicationStats {
  double fraction_single_distinct = 0.0;
  double mean_distinct = 0.0;
  size_t num_bags = 0;
};

DuplicationStats ComputeDuplicationStats(std::span<const Bag> bags);

// JSON-lines {"key":{...},"split":s,"members":[example ids],
// "distinct_count":n,"constituents":[[head,tail],...]}.
void WriteBagManifest(std::span<const Bag> bags,
                      std::span<const Example> examples, std::ostream& out);

}  // namespace amilkit

#endif  // AMILKIT_BAGGING_H_
