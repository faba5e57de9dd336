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

#include "amilkit/bagging.h"

#include <algorithm>
#include <ostream>

#include "amilkit/error.h"
#include "amilkit/jsonl.h"
#include "amilkit/random.h"

namespace amilkit {

std::string_view BagModeName(BagMode mode) {
  return mode == BagMode::kPair ? "pair" : "type";
}

BagMode ParseBagMode(std::string_view name) {
  if (name == "pair") return BagMode::kPair;
  if (name == "type") return BagMode::kType;
  throw Error(ErrorCode::kUsage,
              "mode must be pair or type, got '" + std::string(name) + "'");
}

std::string BagKey::ToString() const {
  return std::string(BagModeName(mode)) + ":" + first + "|" + relation + "|" +
         second;
}

nlohmann::json BagKey::ToJson() const {
  if (mode == BagMode::kPair) {
    return {{"mode", "pair"}, {"e1", first}, {"r", relation}, {"e2", second}};
  }
  return {{"mode", "type"}, {"t1", first}, {"r", relation}, {"t2", second}};
}

BagKey KeyFor(const Example& e, BagMode mode, const KnowledgeGraph& kg) {
  if (mode == BagMode::kPair) return {mode, e.head, e.label, e.tail};
  return {mode, kg.TypeOf(e.head), e.label, kg.TypeOf(e.tail)};
}

std::map<BagKey, std::vector<size_t>> Group(std::span<const Example> examples,
                                            BagMode mode,
                                            const KnowledgeGraph& kg) {
  std::map<BagKey, std::vector<size_t>> groups;
  for (size_t i = 0; i < examples.size(); ++i) {
    groups[KeyFor(examples[i], mode, kg)].push_back(i);
  }
  return groups;
}

std::vector<Bag> Fill(const BagKey& key, std::span<const size_t> indices,
                      std::span<const Example> examples, int bag_size,
                      uint64_t seed) {
  std::vector<size_t> order(indices.begin(), indices.end());
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(order));
  const size_t size = static_cast<size_t>(bag_size);
  std::vector<Bag> bags;
  for (size_t from = 0; from < order.size(); from += size) {
    const size_t to = std::min(order.size(), from + size);
    Bag bag;
    bag.key = key;
    bag.members.assign(order.begin() + from, order.begin() + to);
    bag.distinct_count = static_cast<int>(to - from);
    const size_t chunk = to - from;
    while (bag.members.size() < size) {
      bag.members.push_back(order[from + rng.UniformInt(chunk)]);
    }
    for (size_t m : bag.members) {
      bag.constituents.emplace(examples[m].head, examples[m].tail);
    }
    bags.push_back(std::move(bag));
  }
  return bags;
}

std::vector<Bag> BuildBags(std::span<const Example> examples, BagMode mode,
                           const KnowledgeGraph& kg, int bag_size,
                           uint64_t seed, uint64_t epoch) {
  std::vector<Bag> out;
  for (const auto& [key, indices] : Group(examples, mode, kg)) {
    auto bags = Fill(key, indices, examples, bag_size,
                     DeriveSeed(seed, epoch, key.ToString()));
    for (auto& b : bags) out.push_back(std::move(b));
  }
  return out;
}

DuplicationStats ComputeDuplicationStats(std::span<const Bag> bags) {
  DuplicationStats s;
  s.num_bags = bags.size();
  if (bags.empty()) return s;
  size_t singles = 0;
  double total = 0.0;
  for (const auto& b : bags) {
    if (b.distinct_count == 1) ++singles;
    total += b.distinct_count;
  }
  s.fraction_single_distinct =
      static_cast<double>(singles) / static_cast<double>(bags.size());
  s.mean_distinct = total / static_cast<double>(bags.size());
  return s;
}

void WriteBagManifest(std::span<const Bag> bags,
                      std::span<const Example> examples, std::ostream& out) {
  for (const auto& b : bags) {
    std::vector<int64_t> ids;
    ids.reserve(b.members.size());
    for (size_t m : b.members) ids.push_back(examples[m].id);
    nlohmann::json constituents = nlohmann::json::array();
    for (const auto& [h, t] : b.constituents) constituents.push_back({h, t});
    WriteJsonLine(out, {{"key", b.key.ToJson()},
                        {"split", SplitName(examples[b.members[0]].split)},
                        {"members", ids},
                        {"distinct_count", b.distinct_count},
                        {"constituents", constituents}});
  }
}

}  // namespace amilkit
