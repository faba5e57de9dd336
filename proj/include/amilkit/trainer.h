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

#ifndef AMILKIT_TRAINER_H_
#define AMILKIT_TRAINER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "amilkit/bagging.h"
#include "amilkit/eval.h"
#include "amilkit/kgstore.h"
#include "amilkit/relation_model.h"

namespace amilkit {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 2;  // bags per update
  int max_epochs = 30;
  int patience = 5;
  int bag_size = kDefaultBagSize;
  uint64_t seed = 1;
  int workers = 1;  // dev/test inference only
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_precision = 0.0;
  double dev_recall = 0.0;
  double dev_f1 = 0.0;
};

// Stops after `patience` consecutive epochs without a strictly better score.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  // Returns true if `score` is a new best.
  bool Update(double score);
  bool ShouldStop() const { return stale_ >= patience_; }
  double best() const { return best_; }
  int best_epoch() const { return best_epoch_; }

 private:
  int patience_;
  int stale_ = 0;
  int epochs_ = 0;
  int best_epoch_ = 0;
  double best_ = -1.0;
};

struct TrainResult {
  RelationModel model;  // best dev checkpoint
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
};

// Sentence-level scores of `model` on the examples of one split, each
// example taking the argmax of its bag.
SentenceMetrics EvaluateSplit(const RelationModel& model,
                              std::span<const Example> examples,
                              BagMode mode, const KnowledgeGraph& kg,
                              int bag_size, uint64_t seed, int workers);

// Trains on the train split with early stopping on dev sentence-level F1.
// Train bags are re-chunked every epoch. Throws kDivergence on a non-finite
// loss.
TrainResult Train(std::span<const Example> examples, const KnowledgeGraph& kg,
                  BagMode mode, const ModelConfig& model_config,
                  const TrainConfig& config,
                  std::ostream* progress = nullptr);

void WriteTrainLog(const std::vector<EpochLog>& log, std::ostream& out);

}  // namespace amilkit

#endif  // AMILKIT_TRAINER_H_
