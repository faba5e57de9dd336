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

#ifndef AMILKIT_EVAL_H_
#define AMILKIT_EVAL_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amilkit/bagging.h"
#include "amilkit/kgstore.h"
#include "amilkit/params.h"
#include "json.hpp"

namespace amilkit {

struct TriplePrediction {
  Triple triple;
  double score = 0.0;
  BagKey source;
};

// How a triple scored by several bags gets one score.
enum class TripleScore { kMax, kMean };
std::string_view TripleScoreName(TripleScore s);
TripleScore ParseTripleScore(std::string_view name);

// Scores every constituent pair of every bag with each non-NA class
// probability of that bag; a triple scored by several bags keeps the max (or
// mean) of those scores, with `source` the first bag reaching the max. Output
// is sorted by triple. Throws kMissingMetadata for a bag without
// constituents.
std::vector<TriplePrediction> Deabstract(std::span<const Vector> bag_probs,
                                         std::span<const Bag> bags,
                                         const std::vector<RelationId>& classes,
                                         TripleScore aggregate = TripleScore::kMax);

struct PrPoint {
  int rank = 0;
  double score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct CorpusMetrics {
  double auc = 0.0;
  double f1 = 0.0;
  std::map<int, double> precision_at;
  std::vector<PrPoint> curve;
  size_t num_gold = 0;
  size_t num_predictions = 0;
};

// Ranks predictions by descending score (ties by triple) and measures them
// against `gold`. AUC is the trapezoidal area under precision over recall,
// anchored at (recall 0, precision 1). F1 is the best F1 over all ranks.
// P@k counts correct triples among the top k and divides by k. Throws
// kEmptyGold.
CorpusMetrics CorpusEval(std::vector<TriplePrediction> predictions,
                         const std::set<Triple>& gold,
                         const std::vector<int>& ks);

struct SentenceMetrics {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t count = 0;
};

// Micro-averaged scores. A non-NA prediction matching gold is a TP; any
// other non-NA prediction is a FP; a gold relation that was not predicted
// (NA or a different relation) is a FN.
SentenceMetrics SentenceEval(std::span<const RelationId> predicted,
                             std::span<const RelationId> gold);

using SupportIndex = std::map<Triple, int>;

// Number of supporting examples per triple.
SupportIndex BuildSupportIndex(std::span<const Example> examples);

inline constexpr int kRareSupportMax = 7;

struct ParetoSplit {
  std::set<Triple> rare;
  std::set<Triple> common;
};

// Rare: support <= 7. Common: support >= 8.
ParetoSplit SplitBySupport(const SupportIndex& support);

// Argmax class of the bag each example falls in (examples absent from every
// bag get an empty label). When an example sits in several bags the first
// one wins.
std::vector<RelationId> AssignBagPredictions(
    std::span<const Vector> bag_probs, std::span<const Bag> bags,
    size_t num_examples, const std::vector<RelationId>& classes);

struct EvalReport {
  std::string mode;
  std::string arch;
  CorpusMetrics corpus;
  SentenceMetrics sentence_all;
  SentenceMetrics sentence_rare;
  SentenceMetrics sentence_common;
};

nlohmann::json ReportToJson(const EvalReport& report);
// Writes `<stem>.json` (schema 1) and `<stem>_pr.csv` into `dir`.
void WriteReport(const EvalReport& report, const std::filesystem::path& dir,
                 const std::string& stem);
void WritePrCsv(const std::vector<PrPoint>& curve, std::ostream& out);

}  // namespace amilkit

#endif  // AMILKIT_EVAL_H_
