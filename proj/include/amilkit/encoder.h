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

#ifndef AMILKIT_ENCODER_H_
#define AMILKIT_ENCODER_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "amilkit/distsup.h"
#include "amilkit/params.h"
#include "amilkit/random.h"

namespace amilkit {

struct EncoderConfig {
  int hidden_dim = 64;
  int layers = 2;
  int heads = 2;
  // Feed-forward width; 0 means 4 * hidden_dim.
  int ffn_dim = 0;
  int max_len = kMaxSequenceLength;
  double dropout = 0.1;

  int ffn() const { return ffn_dim > 0 ? ffn_dim : 4 * hidden_dim; }
  // Throws kInvalidConfig.
  void Validate() const;
};

// Token vocabulary. Ids 0..4 are reserved for [PAD], [UNK], [CLS] and the
// two entity markers; the rest are sorted training tokens.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kHeadMarker = 3;
  static constexpr int kTailMarker = 4;

  Vocabulary();
  static Vocabulary FromExamples(std::span<const Example> examples);
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  int Id(const std::string& token) const;
  std::vector<int> Encode(const std::vector<std::string>& tokens) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> ids_;
};

// Post-norm transformer encoder (GELU feed-forward) trained from scratch.
// The encoder only records where its tensors live in a ParameterStore, so a
// model can be copied by copying the store.
class Encoder {
 public:
  struct LayerSlots {
    int wq, bq, wk, bk, wv, bv, wo, bo;
    int ln1_gamma, ln1_beta;
    int w1, b1, w2, b2;
    int ln2_gamma, ln2_beta;
  };

  struct LayerCache {
    Matrix input;                 // T x d
    Matrix q, k, v;               // T x d
    std::vector<Matrix> attn;     // per head, T x T softmax weights
    Matrix context;               // T x d
    Matrix attn_mask;             // dropout mask on attention output
    Matrix ln1_xhat;
    Vector ln1_inv_std;
    Matrix x1;
    Matrix ffn_pre;               // T x ffn
    Matrix ffn_act;
    Matrix ffn_mask;
    Matrix ln2_xhat;
    Vector ln2_inv_std;
  };

  struct Cache {
    std::vector<int> ids;  // with [CLS] prepended
    Matrix emb_mask;
    Matrix emb_xhat;
    Vector emb_inv_std;
    std::vector<LayerCache> layers;
  };

  Encoder() = default;
  Encoder(const EncoderConfig& config, int vocab_size, ParameterStore& store);

  void Initialize(ParameterStore& store, Rng& rng) const;

  // `token_ids` excludes [CLS]; row 0 of the result is the [CLS] position.
  // Dropout is active only when `rng` is non-null. `cache` may be null.
  Matrix Forward(const ParameterStore& store, std::span<const int> token_ids,
                 Rng* rng, Cache* cache) const;

  // Accumulates parameter gradients for d(loss)/d(output) = d_out.
  void Backward(ParameterStore& store, const Cache& cache,
                const Matrix& d_out) const;

  const EncoderConfig& config() const { return config_; }

 private:
  EncoderConfig config_;
  int token_embedding_ = -1;
  int position_embedding_ = -1;
  int emb_ln_gamma_ = -1;
  int emb_ln_beta_ = -1;
  std::vector<LayerSlots> layers_;
};

}  // namespace amilkit

#endif  // AMILKIT_ENCODER_H_
