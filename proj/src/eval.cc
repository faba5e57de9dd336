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

#include "amilkit/eval.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "amilkit/error.h"
#include "amilkit/jsonl.h"

namespace amilkit {
namespace {

double SafeDiv(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double F1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

nlohmann::json SentenceToJson(const SentenceMetrics& m) {
  return {{"tp", m.tp},           {"fp", m.fp},
          {"fn", m.fn},           {"precision", m.precision},
          {"recall", m.recall},   {"f1", m.f1},
          {"count", m.count}};
}

}  // namespace

std::string_view TripleScoreName(TripleScore s) {
  return s == TripleScore::kMax ? "max" : "mean";
}

TripleScore ParseTripleScore(std::string_view name) {
  if (name == "max") return TripleScore::kMax;
  if (name == "mean") return TripleScore::kMean;
  throw Error(ErrorCode::kUsage,
              "unknown triple score '" + std::string(name) + "' (want max or mean)");
}

std::vector<TriplePrediction> Deabstract(std::span<const Vector> bag_probs,
                                         std::span<const Bag> bags,
                                         const std::vector<RelationId>& classes,
                                         TripleScore aggregate) {
  std::map<Triple, TriplePrediction> best;
  std::map<Triple, std::pair<double, int>> sums;
  for (size_t b = 0; b < bags.size(); ++b) {
    const Bag& bag = bags[b];
    if (bag.constituents.empty()) {
      throw Error(ErrorCode::kMissingMetadata,
                  "bag " + bag.key.ToString() + " has no constituent pairs");
    }
    const Vector& probs = bag_probs[b];
    for (size_t c = 0; c < classes.size(); ++c) {
      if (classes[c] == kNaRelation) continue;
      const double p = probs(static_cast<Eigen::Index>(c));
      for (const auto& [head, tail] : bag.constituents) {
        Triple t{head, classes[c], tail};
        auto& sum = sums[t];
        sum.first += p;
        ++sum.second;
        auto it = best.find(t);
        if (it == best.end()) {
          best.emplace(t, TriplePrediction{t, p, bag.key});
        } else if (p > it->second.score) {
          it->second.score = p;
          it->second.source = bag.key;
        }
      }
    }
  }
  std::vector<TriplePrediction> out;
  out.reserve(best.size());
  for (auto& [t, pred] : best) {
    if (aggregate == TripleScore::kMean) {
      const auto& [total, n] = sums.at(t);
      pred.score = total / n;
    }
    out.push_back(std::move(pred));
  }
  return out;
}

CorpusMetrics CorpusEval(std::vector<TriplePrediction> predictions,
                         const std::set<Triple>& gold,
                         const std::vector<int>& ks) {
  if (gold.empty()) throw Error(ErrorCode::kEmptyGold, "no gold triples");
  std::sort(predictions.begin(), predictions.end(),
            [](const TriplePrediction& a, const TriplePrediction& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.triple < b.triple;
            });
  CorpusMetrics m;
  m.num_gold = gold.size();
  m.num_predictions = predictions.size();
  const double n_gold = static_cast<double>(gold.size());
  std::vector<long> correct_at(predictions.size() + 1, 0);
  double prev_recall = 0.0;
  double prev_precision = 1.0;
  long correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (gold.contains(predictions[i].triple)) ++correct;
    correct_at[i + 1] = correct;
    const double precision = static_cast<double>(correct) / static_cast<double>(i + 1);
    const double recall = static_cast<double>(correct) / n_gold;
    m.auc += (recall - prev_recall) * (precision + prev_precision) / 2.0;
    m.f1 = std::max(m.f1, F1(precision, recall));
    m.curve.push_back({static_cast<int>(i + 1), predictions[i].score, precision,
                       recall});
    prev_recall = recall;
    prev_precision = precision;
  }
  for (int k : ks) {
    if (k <= 0) continue;
    const size_t top = std::min(predictions.size(), static_cast<size_t>(k));
    m.precision_at[k] = static_cast<double>(correct_at[top]) / k;
  }
  return m;
}

SentenceMetrics SentenceEval(std::span<const RelationId> predicted,
                             std::span<const RelationId> gold) {
  SentenceMetrics m;
  const size_t n = std::min(predicted.size(), gold.size());
  m.count = n;
  for (size_t i = 0; i < n; ++i) {
    const bool pred_na = predicted[i] == kNaRelation;
    const bool gold_na = gold[i] == kNaRelation;
    if (!pred_na && predicted[i] == gold[i]) {
      ++m.tp;
      continue;
    }
    if (!pred_na) ++m.fp;
    if (!gold_na) ++m.fn;
  }
  m.precision = SafeDiv(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fp));
  m.recall = SafeDiv(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fn));
  m.f1 = F1(m.precision, m.recall);
  return m;
}

SupportIndex BuildSupportIndex(std::span<const Example> examples) {
  SupportIndex index;
  for (const auto& e : examples) ++index[e.triple()];
  return index;
}

ParetoSplit SplitBySupport(const SupportIndex& support) {
  ParetoSplit out;
  for (const auto& [t, count] : support) {
    (count <= kRareSupportMax ? out.rare : out.common).insert(t);
  }
  return out;
}

std::vector<RelationId> AssignBagPredictions(
    std::span<const Vector> bag_probs, std::span<const Bag> bags,
    size_t num_examples, const std::vector<RelationId>& classes) {
  std::vector<RelationId> out(num_examples);
  std::vector<bool> seen(num_examples, false);
  for (size_t b = 0; b < bags.size(); ++b) {
    Eigen::Index best = 0;
    bag_probs[b].maxCoeff(&best);
    for (size_t m : bags[b].members) {
      if (seen[m]) continue;
      seen[m] = true;
      out[m] = classes[static_cast<size_t>(best)];
    }
  }
  return out;
}

nlohmann::json ReportToJson(const EvalReport& r) {
  nlohmann::json p_at = nlohmann::json::object();
  for (const auto& [k, v] : r.corpus.precision_at) p_at[std::to_string(k)] = v;
  return {{"schema", 1},
          {"mode", r.mode},
          {"arch", r.arch},
          {"corpus",
           {{"auc", r.corpus.auc},
            {"f1", r.corpus.f1},
            {"precision_at", p_at},
            {"num_gold", r.corpus.num_gold},
            {"num_predictions", r.corpus.num_predictions}}},
          {"sentence",
           {{"all", SentenceToJson(r.sentence_all)},
            {"rare", SentenceToJson(r.sentence_rare)},
            {"common", SentenceToJson(r.sentence_common)}}}};
}

void WritePrCsv(const std::vector<PrPoint>& curve, std::ostream& out) {
  out << "rank,score,precision,recall\n";
  char buf[128];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", p.rank, p.score,
                  p.precision, p.recall);
    out << buf;
  }
}

void WriteReport(const EvalReport& report, const std::filesystem::path& dir,
                 const std::string& stem) {
  WriteJsonFile(dir / (stem + ".json"), ReportToJson(report));
  std::ofstream csv(dir / (stem + "_pr.csv"), std::ios::binary);
  if (!csv) throw Error(ErrorCode::kIo, "cannot write PR curve in " + dir.string());
  WritePrCsv(report.corpus.curve, csv);
}

}  // namespace amilkit
