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

#include "amilkit/encoder.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "amilkit/error.h"

namespace amilkit {
namespace {

constexpr double kLayerNormEps = 1e-12;

double Gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double GeluGrad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf =
      std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

Matrix Affine(const Matrix& x, ConstMatrixMap w, ConstMatrixMap b) {
  Matrix y = x * w;
  y.rowwise() += b.row(0);
  return y;
}

void AffineBackward(ParameterStore& store, int w, int b, const Matrix& x,
                    const Matrix& dy, Matrix* dx) {
  store.grad(w).noalias() += x.transpose() * dy;
  store.grad(b).row(0) += dy.colwise().sum();
  if (dx != nullptr) dx->noalias() += dy * store.value(w).transpose();
}

Matrix LayerNorm(const Matrix& x, ConstMatrixMap gamma, ConstMatrixMap beta,
                 Matrix* xhat, Vector* inv_std) {
  const Eigen::Index d = x.cols();
  Vector mean = x.rowwise().mean();
  Matrix centered = x.colwise() - mean;
  Vector var = centered.array().square().rowwise().sum() / static_cast<double>(d);
  *inv_std = (var.array() + kLayerNormEps).rsqrt();
  *xhat = centered.array().colwise() * inv_std->array();
  Matrix out = xhat->array().rowwise() * gamma.row(0).array();
  out.rowwise() += beta.row(0);
  return out;
}

Matrix LayerNormBackward(ParameterStore& store, int gamma, int beta,
                         const Matrix& xhat, const Vector& inv_std,
                         const Matrix& dout) {
  const double d = static_cast<double>(xhat.cols());
  store.grad(gamma).row(0) += (dout.array() * xhat.array()).colwise().sum().matrix();
  store.grad(beta).row(0) += dout.colwise().sum();
  Matrix dxhat = dout.array().rowwise() * store.value(gamma).row(0).array();
  Vector sum_dxhat = dxhat.rowwise().sum();
  Vector sum_dxhat_xhat = (dxhat.array() * xhat.array()).rowwise().sum();
  Matrix dx = (d * dxhat.array()).matrix();
  dx.colwise() -= sum_dxhat;
  dx -= (xhat.array().colwise() * sum_dxhat_xhat.array()).matrix();
  dx = dx.array().colwise() * (inv_std.array() / d);
  return dx;
}

// Inverted dropout. Returns an empty mask when inactive.
Matrix DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate,
                   Rng* rng) {
  if (rng == nullptr || rate <= 0.0) return Matrix();
  Matrix mask(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      mask(i, j) = rng->UniformDouble() < rate ? 0.0 : keep;
    }
  }
  return mask;
}

void ApplyMask(Matrix& x, const Matrix& mask) {
  if (mask.size() != 0) x.array() *= mask.array();
}

void InitLinear(ParameterStore& store, int slot, Rng& rng) {
  auto w = store.value(slot);
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.rows()));
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.Normal() * scale;
  }
}

}  // namespace

void EncoderConfig::Validate() const {
  if (hidden_dim <= 0 || layers < 0 || heads <= 0 || max_len <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "encoder sizes must be positive");
  }
  if (hidden_dim % heads != 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "hidden_dim must be divisible by heads");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "dropout must be in [0, 1)");
  }
}

Vocabulary::Vocabulary()
    : tokens_{"[PAD]", "[UNK]", "[CLS]", std::string(amilkit::kHeadMarker),
              std::string(amilkit::kTailMarker)} {
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    ids_[tokens_[i]] = i;
  }
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  Vocabulary v;
  std::sort(tokens.begin(), tokens.end());
  for (auto& t : tokens) {
    if (v.ids_.contains(t)) continue;
    v.ids_[t] = static_cast<int>(v.tokens_.size());
    v.tokens_.push_back(std::move(t));
  }
  return v;
}

Vocabulary Vocabulary::FromExamples(std::span<const Example> examples) {
  std::set<std::string> seen;
  for (const auto& e : examples) seen.insert(e.tokens.begin(), e.tokens.end());
  return FromTokens(std::vector<std::string>(seen.begin(), seen.end()));
}

int Vocabulary::Id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::Encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(Id(t));
  return ids;
}

Encoder::Encoder(const EncoderConfig& config, int vocab_size,
                 ParameterStore& store)
    : config_(config) {
  config_.Validate();
  const int d = config_.hidden_dim;
  const int f = config_.ffn();
  token_embedding_ = store.Add("encoder.token_embedding", vocab_size, d);
  position_embedding_ =
      store.Add("encoder.position_embedding", config_.max_len + 1, d);
  emb_ln_gamma_ = store.Add("encoder.embedding_norm.gamma", 1, d);
  emb_ln_beta_ = store.Add("encoder.embedding_norm.beta", 1, d);
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = "encoder.layer" + std::to_string(l) + ".";
    LayerSlots s;
    s.wq = store.Add(p + "query.weight", d, d);
    s.bq = store.Add(p + "query.bias", 1, d);
    s.wk = store.Add(p + "key.weight", d, d);
    s.bk = store.Add(p + "key.bias", 1, d);
    s.wv = store.Add(p + "value.weight", d, d);
    s.bv = store.Add(p + "value.bias", 1, d);
    s.wo = store.Add(p + "attention_output.weight", d, d);
    s.bo = store.Add(p + "attention_output.bias", 1, d);
    s.ln1_gamma = store.Add(p + "attention_norm.gamma", 1, d);
    s.ln1_beta = store.Add(p + "attention_norm.beta", 1, d);
    s.w1 = store.Add(p + "ffn_in.weight", d, f);
    s.b1 = store.Add(p + "ffn_in.bias", 1, f);
    s.w2 = store.Add(p + "ffn_out.weight", f, d);
    s.b2 = store.Add(p + "ffn_out.bias", 1, d);
    s.ln2_gamma = store.Add(p + "ffn_norm.gamma", 1, d);
    s.ln2_beta = store.Add(p + "ffn_norm.beta", 1, d);
    layers_.push_back(s);
  }
}

void Encoder::Initialize(ParameterStore& store, Rng& rng) const {
  for (int slot : {token_embedding_, position_embedding_}) {
    auto w = store.value(slot);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.Normal() * 0.02;
    }
  }
  store.value(emb_ln_gamma_).setOnes();
  store.value(emb_ln_beta_).setZero();
  for (const auto& s : layers_) {
    for (int w : {s.wq, s.wk, s.wv, s.wo, s.w1, s.w2}) InitLinear(store, w, rng);
    for (int b : {s.bq, s.bk, s.bv, s.bo, s.b1, s.b2}) store.value(b).setZero();
    store.value(s.ln1_gamma).setOnes();
    store.value(s.ln1_beta).setZero();
    store.value(s.ln2_gamma).setOnes();
    store.value(s.ln2_beta).setZero();
  }
}

Matrix Encoder::Forward(const ParameterStore& store,
                        std::span<const int> token_ids, Rng* rng,
                        Cache* cache) const {
  const int d = config_.hidden_dim;
  const int heads = config_.heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto t = static_cast<Eigen::Index>(token_ids.size()) + 1;
  if (t > config_.max_len + 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "sequence of " + std::to_string(t - 1) +
                    " tokens exceeds max_len " + std::to_string(config_.max_len));
  }
  std::vector<int> ids;
  ids.reserve(static_cast<size_t>(t));
  ids.push_back(Vocabulary::kCls);
  ids.insert(ids.end(), token_ids.begin(), token_ids.end());

  auto tok = store.value(token_embedding_);
  auto pos = store.value(position_embedding_);
  Matrix x(t, d);
  for (Eigen::Index i = 0; i < t; ++i) {
    x.row(i) = tok.row(ids[static_cast<size_t>(i)]) + pos.row(i);
  }
  Matrix xhat;
  Vector inv_std;
  x = LayerNorm(x, store.value(emb_ln_gamma_), store.value(emb_ln_beta_), &xhat,
                &inv_std);
  Matrix emb_mask = DropoutMask(t, d, config_.dropout, rng);
  ApplyMask(x, emb_mask);
  if (cache != nullptr) {
    cache->ids = ids;
    cache->emb_mask = std::move(emb_mask);
    cache->emb_xhat = std::move(xhat);
    cache->emb_inv_std = std::move(inv_std);
    cache->layers.assign(layers_.size(), {});
  }

  for (size_t l = 0; l < layers_.size(); ++l) {
    const LayerSlots& s = layers_[l];
    LayerCache local;
    LayerCache& c = cache != nullptr ? cache->layers[l] : local;
    c.input = x;
    c.q = Affine(x, store.value(s.wq), store.value(s.bq));
    c.k = Affine(x, store.value(s.wk), store.value(s.bk));
    c.v = Affine(x, store.value(s.wv), store.value(s.bv));
    c.context.resize(t, d);
    c.attn.resize(static_cast<size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      Matrix scores =
          c.q.middleCols(h * dh, dh) * c.k.middleCols(h * dh, dh).transpose() *
          scale;
      Vector row_max = scores.rowwise().maxCoeff();
      Matrix e = (scores.colwise() - row_max).array().exp();
      Vector row_sum = e.rowwise().sum();
      Matrix a = e.array().colwise() / row_sum.array();
      c.context.middleCols(h * dh, dh) = a * c.v.middleCols(h * dh, dh);
      c.attn[static_cast<size_t>(h)] = std::move(a);
    }
    Matrix attn_out = Affine(c.context, store.value(s.wo), store.value(s.bo));
    c.attn_mask = DropoutMask(t, d, config_.dropout, rng);
    ApplyMask(attn_out, c.attn_mask);
    c.x1 = LayerNorm(x + attn_out, store.value(s.ln1_gamma),
                     store.value(s.ln1_beta), &c.ln1_xhat, &c.ln1_inv_std);
    c.ffn_pre = Affine(c.x1, store.value(s.w1), store.value(s.b1));
    c.ffn_act = c.ffn_pre.unaryExpr([](double v) { return Gelu(v); });
    Matrix ffn_out = Affine(c.ffn_act, store.value(s.w2), store.value(s.b2));
    c.ffn_mask = DropoutMask(t, d, config_.dropout, rng);
    ApplyMask(ffn_out, c.ffn_mask);
    x = LayerNorm(c.x1 + ffn_out, store.value(s.ln2_gamma),
                  store.value(s.ln2_beta), &c.ln2_xhat, &c.ln2_inv_std);
  }
  return x;
}

void Encoder::Backward(ParameterStore& store, const Cache& cache,
                       const Matrix& d_out) const {
  const int d = config_.hidden_dim;
  const int heads = config_.heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix dx = d_out;
  for (size_t li = layers_.size(); li-- > 0;) {
    const LayerSlots& s = layers_[li];
    const LayerCache& c = cache.layers[li];
    // Feed-forward block.
    Matrix dy2 = LayerNormBackward(store, s.ln2_gamma, s.ln2_beta, c.ln2_xhat,
                                   c.ln2_inv_std, dx);
    Matrix dx1 = dy2;
    Matrix dffn_out = dy2;
    ApplyMask(dffn_out, c.ffn_mask);
    Matrix dact = Matrix::Zero(c.ffn_act.rows(), c.ffn_act.cols());
    AffineBackward(store, s.w2, s.b2, c.ffn_act, dffn_out, &dact);
    Matrix dpre = dact.array() *
                  c.ffn_pre.unaryExpr([](double v) { return GeluGrad(v); }).array();
    AffineBackward(store, s.w1, s.b1, c.x1, dpre, &dx1);
    // Attention block.
    Matrix dy1 = LayerNormBackward(store, s.ln1_gamma, s.ln1_beta, c.ln1_xhat,
                                   c.ln1_inv_std, dx1);
    Matrix dinput = dy1;
    Matrix dattn_out = dy1;
    ApplyMask(dattn_out, c.attn_mask);
    Matrix dcontext = Matrix::Zero(c.context.rows(), d);
    AffineBackward(store, s.wo, s.bo, c.context, dattn_out, &dcontext);
    Matrix dq(c.q.rows(), d), dk(c.k.rows(), d), dv(c.v.rows(), d);
    for (int h = 0; h < heads; ++h) {
      const Matrix& a = c.attn[static_cast<size_t>(h)];
      auto dctx_h = dcontext.middleCols(h * dh, dh);
      Matrix da = dctx_h * c.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh) = a.transpose() * dctx_h;
      Vector dot = (da.array() * a.array()).rowwise().sum();
      Matrix ds = (a.array() * (da.colwise() - dot).array()) * scale;
      dq.middleCols(h * dh, dh) = ds * c.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh) = ds.transpose() * c.q.middleCols(h * dh, dh);
    }
    AffineBackward(store, s.wq, s.bq, c.input, dq, &dinput);
    AffineBackward(store, s.wk, s.bk, c.input, dk, &dinput);
    AffineBackward(store, s.wv, s.bv, c.input, dv, &dinput);
    dx = std::move(dinput);
  }
  ApplyMask(dx, cache.emb_mask);
  Matrix demb = LayerNormBackward(store, emb_ln_gamma_, emb_ln_beta_,
                                  cache.emb_xhat, cache.emb_inv_std, dx);
  auto dtok = store.grad(token_embedding_);
  auto dpos = store.grad(position_embedding_);
  for (Eigen::Index i = 0; i < demb.rows(); ++i) {
    dtok.row(cache.ids[static_cast<size_t>(i)]) += demb.row(i);
    dpos.row(i) += demb.row(i);
  }
}

}  // namespace amilkit
