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

#include "amilkit/relation_model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "amilkit/error.h"
#include "amilkit/jsonl.h"
#include "amilkit/parallel.h"

namespace amilkit {
namespace {

constexpr char kCheckpointMagic[8] = {'A', 'M', 'I', 'L', 'C', 'K', 'P', 'T'};
constexpr uint32_t kCheckpointVersion = 1;

template <typename T>
void WriteLittleEndian(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T ReadLittleEndian(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorCode::kParse, "truncated checkpoint");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

nlohmann::json ConfigToJson(const ModelConfig& c) {
  return {{"hidden_dim", c.encoder.hidden_dim},
          {"layers", c.encoder.layers},
          {"heads", c.encoder.heads},
          {"ffn_dim", c.encoder.ffn()},
          {"max_len", c.encoder.max_len},
          {"dropout", c.encoder.dropout},
          {"arch", std::string(1, ArchLetter(c.arch))},
          {"head_dropout", c.head_dropout}};
}

ModelConfig ConfigFromJson(const nlohmann::json& j) {
  ModelConfig c;
  c.encoder.hidden_dim = j.at("hidden_dim").get<int>();
  c.encoder.layers = j.at("layers").get<int>();
  c.encoder.heads = j.at("heads").get<int>();
  c.encoder.ffn_dim = j.at("ffn_dim").get<int>();
  c.encoder.max_len = j.at("max_len").get<int>();
  c.encoder.dropout = j.at("dropout").get<double>();
  c.arch = ParseArch(j.at("arch").get<std::string>());
  c.head_dropout = j.at("head_dropout").get<double>();
  return c;
}

}  // namespace

Vector Softmax(const Vector& logits) {
  Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

double CrossEntropy(const Vector& probs, int gold) {
  return -std::log(std::max(probs(gold), 1e-300));
}

ClassifierHead::ClassifierHead(int repr_dim, int num_classes, double dropout,
                               ParameterStore& store)
    : repr_dim_(repr_dim), num_classes_(num_classes), dropout_(dropout) {
  inner_w_ = store.Add("head.inner.weight", repr_dim, repr_dim);
  inner_b_ = store.Add("head.inner.bias", 1, repr_dim);
  out_w_ = store.Add("head.output.weight", repr_dim, num_classes);
  out_b_ = store.Add("head.output.bias", 1, num_classes);
}

void ClassifierHead::Initialize(ParameterStore& store, Rng& rng) const {
  for (int slot : {inner_w_, out_w_}) {
    auto w = store.value(slot);
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.rows()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.Normal() * scale;
    }
  }
  store.value(inner_b_).setZero();
  store.value(out_b_).setZero();
}

Vector ClassifierHead::Forward(const ParameterStore& store, const Vector& input,
                               Rng* rng, Cache* cache) const {
  Cache local;
  Cache& c = cache != nullptr ? *cache : local;
  c.input = input;
  c.activated = input.array().tanh();
  c.dropped = c.activated;
  c.mask.resize(0);
  if (rng != nullptr && dropout_ > 0.0) {
    c.mask.resize(input.size());
    const double keep = 1.0 / (1.0 - dropout_);
    for (Eigen::Index i = 0; i < c.mask.size(); ++i) {
      c.mask(i) = rng->UniformDouble() < dropout_ ? 0.0 : keep;
    }
    c.dropped.array() *= c.mask.array();
  }
  c.inner = store.value(inner_w_).transpose() * c.dropped +
            store.value(inner_b_).row(0).transpose();
  Vector logits = store.value(out_w_).transpose() * c.inner +
                  store.value(out_b_).row(0).transpose();
  c.probs = Softmax(logits);
  return c.probs;
}

Vector ClassifierHead::Logits(const ParameterStore& store,
                              const Vector& input) const {
  Vector inner = store.value(inner_w_).transpose() * Vector(input.array().tanh()) +
                 store.value(inner_b_).row(0).transpose();
  return store.value(out_w_).transpose() * inner +
         store.value(out_b_).row(0).transpose();
}

Vector ClassifierHead::Backward(ParameterStore& store, const Cache& c, int gold,
                                double scale) const {
  Vector dlogits = c.probs * scale;
  dlogits(gold) -= scale;
  store.grad(out_w_).noalias() += c.inner * dlogits.transpose();
  store.grad(out_b_).row(0) += dlogits.transpose();
  Vector dinner = store.value(out_w_) * dlogits;
  store.grad(inner_w_).noalias() += c.dropped * dinner.transpose();
  store.grad(inner_b_).row(0) += dinner.transpose();
  Vector ddropped = store.value(inner_w_) * dinner;
  if (c.mask.size() != 0) ddropped.array() *= c.mask.array();
  return (ddropped.array() * (1.0 - c.activated.array().square())).matrix();
}

RelationModel::RelationModel(const ModelConfig& config, Vocabulary vocab,
                             std::vector<RelationId> relations,
                             uint64_t init_seed)
    : config_(config), vocab_(std::move(vocab)) {
  std::sort(relations.begin(), relations.end());
  relations.erase(std::unique(relations.begin(), relations.end()),
                  relations.end());
  classes_.emplace_back(kNaRelation);
  for (auto& r : relations) {
    if (r != kNaRelation) classes_.push_back(std::move(r));
  }
  Build();
  Rng rng(init_seed);
  encoder_.Initialize(params_, rng);
  head_.Initialize(params_, rng);
}

void RelationModel::Build() {
  params_ = ParameterStore();
  encoder_ = Encoder(config_.encoder, vocab_.size(), params_);
  head_ = ClassifierHead(repr_dim(), num_classes(), config_.head_dropout,
                         params_);
}

int RelationModel::ClassIndex(const RelationId& label) const {
  auto it = std::find(classes_.begin(), classes_.end(), label);
  return it == classes_.end() ? -1 : static_cast<int>(it - classes_.begin());
}

EncodedExample RelationModel::Encode(const Example& e) const {
  const int label = ClassIndex(e.label);
  return {vocab_.Encode(e.tokens), e.markers, label < 0 ? 0 : label};
}

Matrix RelationModel::EncodeSentence(const EncodedExample& e) const {
  return encoder_.Forward(params_, e.ids, nullptr, nullptr);
}

Vector RelationModel::Represent(const EncodedExample& e) const {
  return BuildRepr(config_.arch, EncodeSentence(e), e.markers);
}

Vector RelationModel::ForwardBag(std::span<const EncodedExample> examples,
                                 std::span<const size_t> members, Rng* rng,
                                 BagCache* cache) const {
  std::map<size_t, int> counts;
  for (size_t m : members) ++counts[m];
  BagCache local;
  BagCache& c = cache != nullptr ? *cache : local;
  c.distinct.clear();
  c.weights.clear();
  c.encoder.assign(counts.size(), {});
  c.hidden.assign(counts.size(), {});
  Vector agg = Vector::Zero(repr_dim());
  const double n = static_cast<double>(members.size());
  size_t i = 0;
  for (const auto& [index, count] : counts) {
    const EncodedExample& e = examples[index];
    c.hidden[i] = encoder_.Forward(params_, e.ids, rng,
                                   cache != nullptr ? &c.encoder[i] : nullptr);
    const double w = count / n;
    agg += w * BuildRepr(config_.arch, c.hidden[i], e.markers);
    c.distinct.push_back(index);
    c.weights.push_back(w);
    ++i;
  }
  return head_.Forward(params_, agg, rng, &c.head);
}

void RelationModel::BackwardBag(std::span<const EncodedExample> examples,
                                const BagCache& cache, int gold, double scale) {
  const Vector dagg = head_.Backward(params_, cache.head, gold, scale);
  for (size_t i = 0; i < cache.distinct.size(); ++i) {
    const EncodedExample& e = examples[cache.distinct[i]];
    Matrix dh = Matrix::Zero(cache.hidden[i].rows(), cache.hidden[i].cols());
    BuildReprBackward(config_.arch, e.markers, cache.weights[i] * dagg, dh);
    encoder_.Backward(params_, cache.encoder[i], dh);
  }
}

// Layout: 8-byte magic "AMILCKPT", u32 version, u64 header length, UTF-8
// JSON header (config, vocab, classes, tensor table), u64 value count, then
// the flat parameter array as IEEE-754 doubles. All integers and doubles are
// little-endian.
void RelationModel::Save(const std::filesystem::path& path) const {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& s : params_.slots()) {
    tensors.push_back({{"name", s.name},
                       {"rows", s.rows},
                       {"cols", s.cols},
                       {"offset", s.offset}});
  }
  nlohmann::json header = {{"config", ConfigToJson(config_)},
                           {"vocab", vocab_.tokens()},
                           {"classes", classes_},
                           {"tensors", tensors},
                           {"layout", "column-major per tensor"}};
  const std::string text = DumpJson(header);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  WriteLittleEndian<uint32_t>(out, kCheckpointVersion);
  WriteLittleEndian<uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  WriteLittleEndian<uint64_t>(out, params_.size());
  for (double v : params_.values()) WriteLittleEndian<double>(out, v);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

RelationModel RelationModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCode::kParse, path.string() + " is not a checkpoint");
  }
  const auto version = ReadLittleEndian<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kParse,
                "unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = ReadLittleEndian<uint64_t>(in);
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw Error(ErrorCode::kParse, "truncated checkpoint header");
  }
  const auto header = nlohmann::json::parse(text);
  RelationModel model;
  model.config_ = ConfigFromJson(header.at("config"));
  model.vocab_ =
      Vocabulary::FromTokens(header.at("vocab").get<std::vector<std::string>>());
  model.classes_ = header.at("classes").get<std::vector<RelationId>>();
  model.Build();
  const auto count = ReadLittleEndian<uint64_t>(in);
  if (count != model.params_.size()) {
    throw Error(ErrorCode::kParse, "checkpoint parameter count mismatch");
  }
  for (double& v : model.params_.values()) v = ReadLittleEndian<double>(in);
  return model;
}

std::vector<Vector> PredictBags(const RelationModel& model,
                                std::span<const EncodedExample> examples,
                                std::span<const Bag> bags, int workers) {
  std::vector<Vector> out(bags.size());
  ParallelFor(bags.size(), workers, [&](size_t i) {
    out[i] = model.ForwardBag(examples, bags[i].members, nullptr, nullptr);
  });
  return out;
}

}  // namespace amilkit
