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

#ifndef AMILKIT_RELATION_MODEL_H_
#define AMILKIT_RELATION_MODEL_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "amilkit/bagging.h"
#include "amilkit/encoder.h"
#include "amilkit/params.h"
#include "amilkit/random.h"
#include "amilkit/relation_repr.h"

namespace amilkit {

// tanh -> dropout -> inner (kd x kd) -> output (kd x classes) -> softmax.
class ClassifierHead {
 public:
  struct Cache {
    Vector input;     // aggregated bag representation
    Vector activated; // tanh(input)
    Vector mask;      // empty when dropout is off
    Vector dropped;
    Vector inner;
    Vector probs;
  };

  ClassifierHead() = default;
  ClassifierHead(int repr_dim, int num_classes, double dropout,
                 ParameterStore& store);

  void Initialize(ParameterStore& store, Rng& rng) const;

  // Class probabilities. Dropout is active only when `rng` is non-null.
  Vector Forward(const ParameterStore& store, const Vector& input, Rng* rng,
                 Cache* cache) const;
  // Logits before the softmax, dropout off.
  Vector Logits(const ParameterStore& store, const Vector& input) const;

  // Accumulates head gradients of scale * (-log p[gold]); returns
  // d(loss)/d(input).
  Vector Backward(ParameterStore& store, const Cache& cache, int gold,
                  double scale) const;

  int inner_weight() const { return inner_w_; }
  int inner_bias() const { return inner_b_; }
  int output_weight() const { return out_w_; }
  int output_bias() const { return out_b_; }

 private:
  int repr_dim_ = 0;
  int num_classes_ = 0;
  double dropout_ = 0.0;
  int inner_w_ = -1, inner_b_ = -1, out_w_ = -1, out_b_ = -1;
};

Vector Softmax(const Vector& logits);
double CrossEntropy(const Vector& probs, int gold);

struct ModelConfig {
  EncoderConfig encoder;
  Arch arch = Arch::C;
  double head_dropout = 0.1;
};

// An example encoded against a vocabulary.
struct EncodedExample {
  std::vector<int> ids;
  MarkerPositions markers;
  int label = 0;
};

// Encoder + relation representation + classifier over NA and the relations.
class RelationModel {
 public:
  struct BagCache {
    std::vector<size_t> distinct;     // example indices, sorted
    std::vector<double> weights;      // multiplicity / bag size
    std::vector<Encoder::Cache> encoder;
    std::vector<Matrix> hidden;
    ClassifierHead::Cache head;
  };

  // Classes are NA followed by `relations` (sorted, NA removed).
  RelationModel(const ModelConfig& config, Vocabulary vocab,
                std::vector<RelationId> relations, uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<RelationId>& classes() const { return classes_; }
  int num_classes() const { return static_cast<int>(classes_.size()); }
  int ClassIndex(const RelationId& label) const;
  int repr_dim() const {
    return Multiplier(config_.arch) * config_.encoder.hidden_dim;
  }

  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const Encoder& encoder() const { return encoder_; }
  const ClassifierHead& head() const { return head_; }

  EncodedExample Encode(const Example& e) const;

  // Hidden sequence of one sentence (eval mode).
  Matrix EncodeSentence(const EncodedExample& e) const;
  Vector Represent(const EncodedExample& e) const;

  // Probabilities for a bag; members index `examples`. Training mode when
  // `rng` is non-null. Each distinct member is encoded once and weighted by
  // its multiplicity, which equals encoding every copy.
  Vector ForwardBag(std::span<const EncodedExample> examples,
                    std::span<const size_t> members, Rng* rng,
                    BagCache* cache) const;

  // Accumulates gradients of scale * loss(bag, gold) into params().
  void BackwardBag(std::span<const EncodedExample> examples,
                   const BagCache& cache, int gold, double scale);

  void Save(const std::filesystem::path& path) const;
  static RelationModel Load(const std::filesystem::path& path);

 private:
  RelationModel() = default;
  void Build();

  ModelConfig config_;
  Vocabulary vocab_;
  std::vector<RelationId> classes_;
  ParameterStore params_;
  Encoder encoder_;
  ClassifierHead head_;
};

// Eval-mode probabilities for every bag.
std::vector<Vector> PredictBags(const RelationModel& model,
                                std::span<const EncodedExample> examples,
                                std::span<const Bag> bags, int workers = 1);

}  // namespace amilkit

#endif  // AMILKIT_RELATION_MODEL_H_
