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

#include "amilkit/trainer.h"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "amilkit/error.h"

namespace amilkit {
namespace {

std::vector<EncodedExample> EncodeAll(const RelationModel& model,
                                      std::span<const Example> examples) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(model.Encode(e));
  return out;
}

}  // namespace

bool EarlyStopper::Update(double score) {
  ++epochs_;
  if (score > best_) {
    best_ = score;
    best_epoch_ = epochs_;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

SentenceMetrics EvaluateSplit(const RelationModel& model,
                              std::span<const Example> examples,
                              BagMode mode, const KnowledgeGraph& kg,
                              int bag_size, uint64_t seed, int workers) {
  const auto bags = BuildBags(examples, mode, kg, bag_size, seed, 0);
  const auto encoded = EncodeAll(model, examples);
  const auto probs = PredictBags(model, encoded, bags, workers);
  const auto predicted =
      AssignBagPredictions(probs, bags, examples.size(), model.classes());
  std::vector<RelationId> gold;
  gold.reserve(examples.size());
  for (const auto& e : examples) gold.push_back(e.label);
  return SentenceEval(predicted, gold);
}

TrainResult Train(std::span<const Example> examples, const KnowledgeGraph& kg,
                  BagMode mode, const ModelConfig& model_config,
                  const TrainConfig& config, std::ostream* progress) {
  const std::vector<Example> train = SelectSplit(examples, Split::kTrain);
  const std::vector<Example> dev = SelectSplit(examples, Split::kDev);
  if (train.empty() || dev.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "train and dev splits must be nonempty");
  }
  std::set<RelationId> labels;
  for (const auto& e : examples) labels.insert(e.label);
  RelationModel model(model_config, Vocabulary::FromExamples(train),
                      std::vector<RelationId>(labels.begin(), labels.end()),
                      DeriveSeed(config.seed, 0, "init"));
  const std::vector<EncodedExample> encoded = EncodeAll(model, train);

  AdamOptimizer adam(model.params().size(), {config.learning_rate});
  EarlyStopper stopper(config.patience);
  TrainResult result{model, {}, 0, 0.0};
  Rng dropout_rng(DeriveSeed(config.seed, 0, "dropout"));
  RelationModel::BagCache cache;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<Bag> bags = BuildBags(train, mode, kg, config.bag_size,
                                      config.seed, static_cast<uint64_t>(epoch));
    Rng order_rng(DeriveSeed(config.seed, static_cast<uint64_t>(epoch), "order"));
    order_rng.Shuffle(std::span<Bag>(bags));

    double loss_sum = 0.0;
    for (size_t from = 0; from < bags.size();
         from += static_cast<size_t>(config.batch_size)) {
      const size_t to =
          std::min(bags.size(), from + static_cast<size_t>(config.batch_size));
      const double scale = 1.0 / static_cast<double>(to - from);
      model.params().ZeroGrad();
      for (size_t b = from; b < to; ++b) {
        const int gold = model.ClassIndex(bags[b].key.relation);
        Vector probs = model.ForwardBag(encoded, bags[b].members, &dropout_rng,
                                        &cache);
        const double loss = CrossEntropy(probs, gold);
        if (!std::isfinite(loss)) {
          throw Error(ErrorCode::kDivergence,
                      "non-finite loss at epoch " + std::to_string(epoch) +
                          " on bag " + bags[b].key.ToString());
        }
        loss_sum += loss;
        model.BackwardBag(encoded, cache, gold, scale);
      }
      adam.Step(model.params());
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(bags.size());
    const SentenceMetrics dev_metrics = EvaluateSplit(
        model, dev, mode, kg, config.bag_size, config.seed, config.workers);
    entry.dev_precision = dev_metrics.precision;
    entry.dev_recall = dev_metrics.recall;
    entry.dev_f1 = dev_metrics.f1;
    result.log.push_back(entry);
    if (progress != nullptr) {
      char line[160];
      std::snprintf(line, sizeof(line),
                    "epoch %d loss %.5f dev P %.4f R %.4f F1 %.4f\n", epoch,
                    entry.train_loss, entry.dev_precision, entry.dev_recall,
                    entry.dev_f1);
      *progress << line << std::flush;
    }
    if (stopper.Update(entry.dev_f1)) {
      result.model = model;
      result.best_epoch = epoch;
      result.best_dev_f1 = entry.dev_f1;
    }
    if (stopper.ShouldStop()) break;
  }
  return result;
}

void WriteTrainLog(const std::vector<EpochLog>& log, std::ostream& out) {
  out << "epoch,train_loss,dev_precision,dev_recall,dev_f1\n";
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch,
                  e.train_loss, e.dev_precision, e.dev_recall, e.dev_f1);
    out << buf;
  }
}

}  // namespace amilkit
