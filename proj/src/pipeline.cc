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

#include "amilkit/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "amilkit/error.h"
#include "amilkit/jsonl.h"
#include "amilkit/parallel.h"

namespace amilkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <typename T>
void Get(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("config field '") + key + "': " + e.what());
  }
}

const json& Section(const json& j, const char* key) {
  static const json kEmpty = json::object();
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return kEmpty;
  if (!it->is_object()) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("config section '") + key + "' must be an object");
  }
  return *it;
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void RequireFile(const fs::path& path, const char* what) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kIo, std::string(what) + " not found: " + path.string() +
                                    " (run the earlier subcommand first)");
  }
}

fs::path InstancesPath(const RunConfig& c) { return c.workdir / "instances.jsonl"; }

fs::path ModelPath(const RunConfig& c) {
  return c.workdir / ("model_" + RunTag(c.mode, c.model.arch) + ".ckpt");
}

json SentenceSummary(const SentenceMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

json PreprocessStats::ToJson() const {
  return {{"version", kArtifactVersion},
          {"documents", documents},
          {"sentences", sentences},
          {"unique_sentences", unique_sentences},
          {"positives", positives},
          {"negative_target", negative_target},
          {"negatives", negatives},
          {"truncated", truncated},
          {"split_conflicts", split_conflicts},
          {"examples", examples},
          {"train", train},
          {"dev", dev},
          {"test", test}};
}

PreprocessResult Preprocess(const std::vector<Document>& documents,
                            const KnowledgeGraph& kg,
                            const PreprocessOptions& options) {
  const KnowledgeGraph graph = options.excluded_relations.empty()
                                   ? kg
                                   : FilterRelations(kg, options.excluded_relations);
  PreprocessResult result;
  PreprocessStats& stats = result.stats;
  stats.documents = documents.size();
  const std::vector<Sentence> sentences = SegmentCorpus(documents, options.workers);
  stats.sentences = sentences.size();
  const std::vector<Sentence> unique = Dedupe(sentences);
  stats.unique_sentences = unique.size();

  const DictionaryMatcher matcher = DictionaryMatcher::Build(graph);
  std::vector<Instance> instances = Align(unique, matcher, graph, options.workers);
  stats.positives = instances.size();
  stats.negative_target = NegativeTarget(instances, options.negatives.ratio);
  std::vector<Instance> negatives =
      SampleNegatives(instances, graph, DeriveSeed(options.seed, 0, "negatives"),
                      options.negatives);
  stats.negatives = negatives.size();
  instances.insert(instances.end(), std::make_move_iterator(negatives.begin()),
                   std::make_move_iterator(negatives.end()));

  std::vector<Instance> kept;
  std::vector<MarkedSentence> marked;
  for (auto& inst : instances) {
    try {
      marked.push_back(InsertMarkers(inst, options.max_len));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMarkerTruncated) throw;
      ++stats.truncated;
      continue;
    }
    kept.push_back(std::move(inst));
  }

  const SplitAssignment splits =
      MakeSplits(kept, DeriveSeed(options.seed, 0, "splits"), options.splits);
  stats.split_conflicts = splits.dropped_instances;
  int64_t next_id = 0;
  for (size_t i = 0; i < kept.size(); ++i) {
    if (!splits.instance_split[i]) continue;
    Example e;
    e.id = next_id++;
    e.doc_id = kept[i].sentence.doc_id;
    e.index = kept[i].sentence.index;
    e.tokens = std::move(marked[i].tokens);
    e.markers = marked[i].markers;
    e.head = kept[i].head.entity;
    e.tail = kept[i].tail.entity;
    e.label = kept[i].label;
    e.split = *splits.instance_split[i];
    e.negative = kept[i].negative;
    switch (e.split) {
      case Split::kTrain:
        ++stats.train;
        break;
      case Split::kDev:
        ++stats.dev;
        break;
      case Split::kTest:
        ++stats.test;
        break;
    }
    result.examples.push_back(std::move(e));
  }
  stats.examples = result.examples.size();
  return result;
}

EvalReport Evaluate(const RelationModel& model, std::span<const Example> examples,
                    const KnowledgeGraph& kg, const EvalOptions& options) {
  const std::vector<Example> test = SelectSplit(examples, Split::kTest);
  const std::vector<Bag> bags =
      BuildBags(test, options.mode, kg, options.bag_size, options.seed, 0);
  std::vector<EncodedExample> encoded;
  encoded.reserve(test.size());
  for (const auto& e : test) encoded.push_back(model.Encode(e));
  const std::vector<Vector> probs =
      PredictBags(model, encoded, bags, options.workers);

  EvalReport report;
  report.mode = std::string(BagModeName(options.mode));
  report.arch = std::string(1, ArchLetter(model.config().arch));

  std::set<Triple> gold;
  for (const auto& e : test) {
    if (!e.negative && e.label != kNaRelation) gold.insert(e.triple());
  }
  report.corpus =
      CorpusEval(Deabstract(probs, bags, model.classes(), options.triple_score),
                 gold, options.p_at);

  const std::vector<RelationId> predicted =
      AssignBagPredictions(probs, bags, test.size(), model.classes());
  std::vector<RelationId> labels;
  labels.reserve(test.size());
  for (const auto& e : test) labels.push_back(e.label);
  report.sentence_all = SentenceEval(predicted, labels);

  const SupportIndex support = BuildSupportIndex(examples);
  std::vector<RelationId> rare_pred, rare_gold, common_pred, common_gold;
  for (size_t i = 0; i < test.size(); ++i) {
    if (test[i].negative || test[i].label == kNaRelation) continue;
    const int s = support.at(test[i].triple());
    auto& p = s <= kRareSupportMax ? rare_pred : common_pred;
    auto& g = s <= kRareSupportMax ? rare_gold : common_gold;
    p.push_back(predicted[i]);
    g.push_back(labels[i]);
  }
  report.sentence_rare = SentenceEval(rare_pred, rare_gold);
  report.sentence_common = SentenceEval(common_pred, common_gold);
  return report;
}

void RunConfig::Merge(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  Get(j, "seed", seed);
  Get(j, "bag_size", bag_size);
  Get(j, "workers", workers);
  Get(j, "p_at", p_at);
  if (j.contains("mode")) {
    std::string m;
    Get(j, "mode", m);
    mode = ParseBagMode(m);
  }
  if (j.contains("triple_score")) {
    std::string t;
    Get(j, "triple_score", t);
    triple_score = ParseTripleScore(t);
  }
  if (j.contains("arch")) {
    std::string a;
    Get(j, "arch", a);
    model.arch = ParseArch(a);
  }

  const json& paths = Section(j, "paths");
  std::string p;
  if (p.clear(), Get(paths, "workdir", p), !p.empty()) workdir = p;
  if (p.clear(), Get(paths, "kg", p), !p.empty()) kg_path = p;
  if (p.clear(), Get(paths, "corpus", p), !p.empty()) corpus_path = p;

  const json& enc = Section(j, "encoder");
  Get(enc, "hidden_dim", model.encoder.hidden_dim);
  Get(enc, "layers", model.encoder.layers);
  Get(enc, "heads", model.encoder.heads);
  Get(enc, "ffn_dim", model.encoder.ffn_dim);
  Get(enc, "max_len", model.encoder.max_len);
  Get(enc, "dropout", model.encoder.dropout);
  Get(Section(j, "head"), "dropout", model.head_dropout);

  const json& tr = Section(j, "train");
  Get(tr, "learning_rate", train.learning_rate);
  Get(tr, "batch_size", train.batch_size);
  Get(tr, "max_epochs", train.max_epochs);
  Get(tr, "patience", train.patience);

  const json& pre = Section(j, "preprocess");
  Get(pre, "negative_ratio", preprocess.negatives.ratio);
  Get(pre, "reject_reverse", preprocess.negatives.reject_reverse);
  Get(pre, "attempts_per_target", preprocess.negatives.attempts_per_target);
  Get(pre, "test_fraction", preprocess.splits.test_fraction);
  Get(pre, "dev_fraction", preprocess.splits.dev_fraction);
  Get(pre, "max_len", preprocess.max_len);
  Get(pre, "exclude_relations", preprocess.excluded_relations);

  if (j.contains("synth")) {
    json merged = synth.ToJson();
    merged.update(Section(j, "synth"));
    synth = SynthConfig::FromJson(merged);
  }
}

json RunConfig::ToJson() const {
  const auto& e = model.encoder;
  return {{"seed", seed},
          {"mode", std::string(BagModeName(mode))},
          {"arch", std::string(1, ArchLetter(model.arch))},
          {"bag_size", bag_size},
          {"workers", workers},
          {"p_at", p_at},
          {"triple_score", std::string(TripleScoreName(triple_score))},
          {"paths",
           {{"workdir", workdir.string()},
            {"kg", KgPath().string()},
            {"corpus", CorpusPath().string()}}},
          {"encoder",
           {{"hidden_dim", e.hidden_dim},
            {"layers", e.layers},
            {"heads", e.heads},
            {"ffn_dim", e.ffn_dim},
            {"max_len", e.max_len},
            {"dropout", e.dropout}}},
          {"head", {{"dropout", model.head_dropout}}},
          {"train",
           {{"learning_rate", train.learning_rate},
            {"batch_size", train.batch_size},
            {"max_epochs", train.max_epochs},
            {"patience", train.patience}}},
          {"preprocess",
           {{"negative_ratio", preprocess.negatives.ratio},
            {"reject_reverse", preprocess.negatives.reject_reverse},
            {"attempts_per_target", preprocess.negatives.attempts_per_target},
            {"test_fraction", preprocess.splits.test_fraction},
            {"dev_fraction", preprocess.splits.dev_fraction},
            {"max_len", preprocess.max_len},
            {"exclude_relations", preprocess.excluded_relations}}},
          {"synth", synth.ToJson()}};
}

void RunConfig::Finalize() {
  if (workers <= 0) workers = DefaultWorkers();
  if (bag_size <= 0) throw Error(ErrorCode::kInvalidConfig, "bag_size must be positive");
  if (train.batch_size <= 0 || train.max_epochs <= 0 || train.patience <= 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "train batch_size, max_epochs and patience must be positive");
  }
  if (!(train.learning_rate >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "learning_rate must be non-negative");
  }
  if (preprocess.max_len > model.encoder.max_len) {
    throw Error(ErrorCode::kInvalidConfig,
                "preprocess.max_len exceeds the encoder position table");
  }
  for (int k : p_at) {
    if (k <= 0) throw Error(ErrorCode::kInvalidConfig, "p_at values must be positive");
  }
  model.encoder.Validate();
  train.bag_size = bag_size;
  train.seed = seed;
  train.workers = workers;
  preprocess.seed = seed;
  preprocess.workers = workers;
  synth.Validate();
}

fs::path RunConfig::KgPath() const {
  return kg_path.empty() ? workdir / "kg.tsv" : kg_path;
}

fs::path RunConfig::CorpusPath() const {
  return corpus_path.empty() ? workdir / "corpus.jsonl" : corpus_path;
}

std::string ModeTag(BagMode mode) { return std::string(BagModeName(mode)); }

std::string RunTag(BagMode mode, Arch arch) {
  return ModeTag(mode) + "_" + ArchLetter(arch);
}

json RunSynth(const RunConfig& config) {
  fs::create_directories(config.workdir);
  const KnowledgeGraph kg = GenKg(config.synth);
  const SynthCorpus corpus = GenCorpus(config.synth, kg);
  SaveKg(kg, config.workdir / "kg.tsv");
  {
    auto out = OpenOut(config.workdir / "corpus.jsonl");
    WriteCorpus(corpus.documents, out);
  }
  {
    auto out = OpenOut(config.workdir / "gold.jsonl");
    WriteGold(corpus.gold, out);
  }
  json summary = {{"version", kArtifactVersion},
                  {"config", config.synth.ToJson()},
                  {"entities", kg.num_entities()},
                  {"triples", kg.edges().size()},
                  {"documents", corpus.documents.size()},
                  {"sentences", corpus.gold.size()}};
  WriteJsonFile(config.workdir / "synth_summary.json", summary);
  return summary;
}

json RunPreprocess(const RunConfig& config) {
  RequireFile(config.KgPath(), "knowledge graph");
  RequireFile(config.CorpusPath(), "corpus");
  fs::create_directories(config.workdir);
  const KnowledgeGraph kg = LoadKg(config.KgPath());
  const std::vector<Document> docs = LoadCorpus(config.CorpusPath());
  const PreprocessResult result = Preprocess(docs, kg, config.preprocess);
  {
    auto out = OpenOut(InstancesPath(config));
    WriteExamples(result.examples, out);
  }
  const json stats = result.stats.ToJson();
  WriteJsonFile(config.workdir / "preprocess_stats.json", stats);
  return stats;
}

json RunBag(const RunConfig& config) {
  RequireFile(config.KgPath(), "knowledge graph");
  RequireFile(InstancesPath(config), "instance file");
  const KnowledgeGraph kg = LoadKg(config.KgPath());
  const std::vector<Example> examples = LoadExamples(InstancesPath(config));
  const std::string tag = ModeTag(config.mode);
  auto out = OpenOut(config.workdir / ("bags_" + tag + ".jsonl"));
  json stats = {{"version", kArtifactVersion}, {"mode", tag},
                {"bag_size", config.bag_size}};
  std::vector<Bag> all;
  for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
    const std::vector<Example> subset = SelectSplit(examples, s);
    std::vector<Bag> bags =
        BuildBags(subset, config.mode, kg, config.bag_size, config.seed, 0);
    WriteBagManifest(bags, subset, out);
    const DuplicationStats d = ComputeDuplicationStats(bags);
    stats[std::string(SplitName(s))] = {
        {"num_bags", d.num_bags},
        {"fraction_single_distinct", d.fraction_single_distinct},
        {"mean_distinct", d.mean_distinct}};
    all.insert(all.end(), std::make_move_iterator(bags.begin()),
               std::make_move_iterator(bags.end()));
  }
  const DuplicationStats d = ComputeDuplicationStats(all);
  stats["all"] = {{"num_bags", d.num_bags},
                  {"fraction_single_distinct", d.fraction_single_distinct},
                  {"mean_distinct", d.mean_distinct}};
  WriteJsonFile(config.workdir / ("bag_stats_" + tag + ".json"), stats);
  return stats;
}

json RunTrain(const RunConfig& config, std::ostream* progress) {
  RequireFile(config.KgPath(), "knowledge graph");
  RequireFile(InstancesPath(config), "instance file");
  const KnowledgeGraph kg = LoadKg(config.KgPath());
  const std::vector<Example> examples = LoadExamples(InstancesPath(config));
  const TrainResult result =
      Train(examples, kg, config.mode, config.model, config.train, progress);
  const std::string tag = RunTag(config.mode, config.model.arch);
  result.model.Save(ModelPath(config));
  {
    auto out = OpenOut(config.workdir / ("train_log_" + tag + ".csv"));
    WriteTrainLog(result.log, out);
  }
  return {{"version", kArtifactVersion},
          {"model", ModelPath(config).filename().string()},
          {"epochs", result.log.size()},
          {"best_epoch", result.best_epoch},
          {"best_dev_f1", result.best_dev_f1}};
}

json RunEval(const RunConfig& config) {
  RequireFile(config.KgPath(), "knowledge graph");
  RequireFile(InstancesPath(config), "instance file");
  RequireFile(ModelPath(config), "model checkpoint");
  const KnowledgeGraph kg = LoadKg(config.KgPath());
  const std::vector<Example> examples = LoadExamples(InstancesPath(config));
  const RelationModel model = RelationModel::Load(ModelPath(config));
  EvalOptions options;
  options.mode = config.mode;
  options.bag_size = config.bag_size;
  options.seed = config.seed;
  options.p_at = config.p_at;
  options.triple_score = config.triple_score;
  options.workers = config.workers;
  const EvalReport report = Evaluate(model, examples, kg, options);
  const std::string stem = "metrics_" + RunTag(config.mode, config.model.arch);
  WriteReport(report, config.workdir, stem);
  return {{"version", kArtifactVersion},
          {"metrics", stem + ".json"},
          {"auc", report.corpus.auc},
          {"f1", report.corpus.f1},
          {"sentence_rare", SentenceSummary(report.sentence_rare)}};
}

json RunReport(const RunConfig& config) {
  std::vector<fs::path> files;
  if (fs::is_directory(config.workdir)) {
    for (const auto& entry : fs::directory_iterator(config.workdir)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("metrics_") && name.ends_with(".json")) {
        files.push_back(entry.path());
      }
    }
  }
  if (files.empty()) {
    throw Error(ErrorCode::kIo, "no metrics_*.json in " + config.workdir.string() +
                                    " (run eval first)");
  }
  std::sort(files.begin(), files.end());
  auto out = OpenOut(config.workdir / "report.csv");
  out << "run,mode,arch,auc,f1";
  for (int k : config.p_at) out << ",p@" << k;
  out << ",sent_f1_all,sent_f1_rare,sent_f1_common\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& path : files) {
    const json m = ReadJsonFile(path);
    const std::string run = path.stem().string().substr(8);
    out << run << ',' << m.at("mode").get<std::string>() << ','
        << m.at("arch").get<std::string>() << ','
        << num(m.at("corpus").at("auc").get<double>()) << ','
        << num(m.at("corpus").at("f1").get<double>());
    const json& p_at = m.at("corpus").at("precision_at");
    for (int k : config.p_at) {
      auto it = p_at.find(std::to_string(k));
      out << ',' << (it == p_at.end() ? std::string() : num(it->get<double>()));
    }
    const json& s = m.at("sentence");
    out << ',' << num(s.at("all").at("f1").get<double>()) << ','
        << num(s.at("rare").at("f1").get<double>()) << ','
        << num(s.at("common").at("f1").get<double>()) << '\n';
  }
  return {{"version", kArtifactVersion}, {"report", "report.csv"},
          {"runs", files.size()}};
}

void WriteAblationHeader(const std::vector<int>& p_at, std::ostream& out) {
  out << "arch,description,f1,auc";
  for (int k : p_at) out << ",p@" << k;
  out << '\n';
}

void WriteAblationRow(Arch arch, const EvalReport& report,
                      const std::vector<int>& p_at, std::ostream& out) {
  char buf[64];
  out << ArchLetter(arch) << ",\"" << ArchDescription(arch) << '"';
  std::snprintf(buf, sizeof(buf), ",%.6f,%.6f", report.corpus.f1, report.corpus.auc);
  out << buf;
  for (int k : p_at) {
    auto it = report.corpus.precision_at.find(k);
    std::snprintf(buf, sizeof(buf), ",%.6f",
                  it == report.corpus.precision_at.end() ? 0.0 : it->second);
    out << buf;
  }
  out << '\n';
}

json RunAblate(const RunConfig& config, std::ostream* progress) {
  RequireFile(config.KgPath(), "knowledge graph");
  RequireFile(InstancesPath(config), "instance file");
  const KnowledgeGraph kg = LoadKg(config.KgPath());
  const std::vector<Example> examples = LoadExamples(InstancesPath(config));
  EvalOptions options;
  options.mode = config.mode;
  options.bag_size = config.bag_size;
  options.seed = config.seed;
  options.p_at = config.p_at;
  options.triple_score = config.triple_score;
  options.workers = config.workers;

  const fs::path path = config.workdir / ("ablation_" + ModeTag(config.mode) + ".csv");
  auto out = OpenOut(path);
  WriteAblationHeader(config.p_at, out);
  for (Arch arch : kAllArchs) {
    ModelConfig model_config = config.model;
    model_config.arch = arch;
    if (progress != nullptr) *progress << "arch " << ArchLetter(arch) << '\n';
    const TrainResult trained =
        Train(examples, kg, config.mode, model_config, config.train, progress);
    WriteAblationRow(arch, Evaluate(trained.model, examples, kg, options),
                     config.p_at, out);
    out.flush();
  }
  return {{"version", kArtifactVersion}, {"ablation", path.filename().string()},
          {"rows", kAllArchs.size()}};
}

}  // namespace amilkit
