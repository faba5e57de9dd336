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

#ifndef AMILKIT_PIPELINE_H_
#define AMILKIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "amilkit/bagging.h"
#include "amilkit/distsup.h"
#include "amilkit/eval.h"
#include "amilkit/kgstore.h"
#include "amilkit/relation_model.h"
#include "amilkit/synthgen.h"
#include "amilkit/textpipe.h"
#include "amilkit/trainer.h"
#include "json.hpp"

namespace amilkit {

// Version stamped into every artifact written by the Run* functions.
inline constexpr int kArtifactVersion = 1;

struct PreprocessOptions {
  NegativeSamplingOptions negatives;
  SplitOptions splits;
  int max_len = kMaxSequenceLength;
  std::set<RelationId> excluded_relations;
  uint64_t seed = 1;
  int workers = 1;
};

struct PreprocessStats {
  size_t documents = 0;
  size_t sentences = 0;
  size_t unique_sentences = 0;
  size_t positives = 0;
  size_t negative_target = 0;
  size_t negatives = 0;
  size_t truncated = 0;       // instances whose markers did not fit
  size_t split_conflicts = 0; // instances dropped by MakeSplits
  size_t examples = 0;
  size_t train = 0;
  size_t dev = 0;
  size_t test = 0;

  nlohmann::json ToJson() const;
};

struct PreprocessResult {
  std::vector<Example> examples;
  PreprocessStats stats;
};

// segment -> dedupe -> match -> align -> negatives -> markers -> splits.
// Example ids are assigned densely in output order.
PreprocessResult Preprocess(const std::vector<Document>& documents,
                            const KnowledgeGraph& kg,
                            const PreprocessOptions& options);

struct EvalOptions {
  BagMode mode = BagMode::kPair;
  int bag_size = kDefaultBagSize;
  uint64_t seed = 1;
  std::vector<int> p_at = {100, 200, 300};
  TripleScore triple_score = TripleScore::kMax;
  int workers = 1;
};

// Scores the test split. Corpus metrics use de-abstracted bag predictions
// against the positive test triples. Sentence metrics give each example its
// bag's argmax; the rare and common slices hold positive examples whose
// triple support (counted over all splits) is <= 7 or >= 8.
EvalReport Evaluate(const RelationModel& model, std::span<const Example> examples,
                    const KnowledgeGraph& kg, const EvalOptions& options);

// Everything one CLI invocation needs.
struct RunConfig {
  std::filesystem::path workdir;
  std::filesystem::path kg_path;      // default: <workdir>/kg.tsv
  std::filesystem::path corpus_path;  // default: <workdir>/corpus.jsonl
  BagMode mode = BagMode::kPair;
  int bag_size = kDefaultBagSize;
  uint64_t seed = 1;
  std::vector<int> p_at = {100, 200, 300};
  TripleScore triple_score = TripleScore::kMax;
  int workers = 1;
  ModelConfig model;
  TrainConfig train;
  SynthConfig synth;
  PreprocessOptions preprocess;

  // Applies the fields present in `j` over the current values. Throws
  // kInvalidConfig.
  void Merge(const nlohmann::json& j);
  nlohmann::json ToJson() const;
  // Copies seed/bag_size/workers into the nested configs and validates.
  void Finalize();

  std::filesystem::path KgPath() const;
  std::filesystem::path CorpusPath() const;
};

// Artifact names inside the workdir.
std::string ModeTag(BagMode mode);
std::string RunTag(BagMode mode, Arch arch);

// Subcommand bodies. Each writes its artifacts into config.workdir and
// returns a short JSON summary.
nlohmann::json RunSynth(const RunConfig& config);
nlohmann::json RunPreprocess(const RunConfig& config);
nlohmann::json RunBag(const RunConfig& config);
nlohmann::json RunTrain(const RunConfig& config, std::ostream* progress);
nlohmann::json RunEval(const RunConfig& config);
nlohmann::json RunReport(const RunConfig& config);
nlohmann::json RunAblate(const RunConfig& config, std::ostream* progress);

// Ablation table header: arch,description,f1,auc,p@k...
void WriteAblationHeader(const std::vector<int>& p_at, std::ostream& out);
void WriteAblationRow(Arch arch, const EvalReport& report,
                      const std::vector<int>& p_at, std::ostream& out);

}  // namespace amilkit

#endif  // AMILKIT_PIPELINE_H_
