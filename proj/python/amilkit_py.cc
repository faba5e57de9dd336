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

// Python bindings for the core library.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <vector>

#include "amilkit/error.h"
#include "amilkit/eval.h"
#include "amilkit/pipeline.h"
#include "amilkit/relation_repr.h"
#include "amilkit/textpipe.h"

namespace py = pybind11;

namespace amilkit {
namespace {

using TripleTuple = std::tuple<std::string, std::string, std::string>;

Triple ToTriple(const TripleTuple& t) {
  return {std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

MarkerPositions ToMarkers(const std::tuple<int, int, int, int>& m) {
  return {std::get<0>(m), std::get<1>(m), std::get<2>(m), std::get<3>(m)};
}

py::dict SentenceDict(const SentenceMetrics& m) {
  py::dict d;
  d["tp"] = m.tp;
  d["fp"] = m.fp;
  d["fn"] = m.fn;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  return d;
}

// JSON crosses the boundary as text so no converter is needed.
std::string Run(const std::string& command, const std::string& config_json) {
  RunConfig config;
  config.workers = 0;
  config.Merge(nlohmann::json::parse(config_json));
  if (config.workdir.empty()) {
    throw Error(ErrorCode::kUsage, "config needs paths.workdir");
  }
  config.Finalize();
  nlohmann::json out;
  if (command == "synth") {
    out = RunSynth(config);
  } else if (command == "preprocess") {
    out = RunPreprocess(config);
  } else if (command == "bag") {
    out = RunBag(config);
  } else if (command == "train") {
    out = RunTrain(config, nullptr);
  } else if (command == "eval") {
    out = RunEval(config);
  } else if (command == "report") {
    out = RunReport(config);
  } else if (command == "ablate") {
    out = RunAblate(config, nullptr);
  } else {
    throw Error(ErrorCode::kUsage, "unknown command " + command);
  }
  return out.dump();
}

}  // namespace
}  // namespace amilkit

PYBIND11_MODULE(_amilkit, m) {
  using namespace amilkit;
  m.doc() = "Core routines of amilkit";

  static py::exception<Error> error(m, "AmilkitError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message =
          std::string(ErrorCodeName(e.code())) + ": " + e.what();
      PyErr_SetString(error.ptr(), message.c_str());
    }
  });

  m.def("multiplier", [](const std::string& arch) { return Multiplier(ParseArch(arch)); },
        "Representation width as a multiple of the hidden size.");
  m.def("arch_description",
        [](const std::string& arch) { return ArchDescription(ParseArch(arch)); });
  m.def(
      "build_repr",
      [](const std::string& arch, const Matrix& h,
         const std::tuple<int, int, int, int>& markers) {
        return BuildRepr(ParseArch(arch), h, ToMarkers(markers));
      },
      py::arg("arch"), py::arg("hidden"), py::arg("markers"),
      "Relation representation from encoder rows (row 0 is [CLS]). Markers are "
      "(e1_start, e1_end, e2_start, e2_end) token indices.");
  m.def("span_pool", &SpanPool, py::arg("hidden"), py::arg("j"), py::arg("k"));

  m.def(
      "segment",
      [](const std::string& text) {
        std::vector<std::string> out;
        for (auto& s : Segment({"doc", text})) out.push_back(std::move(s.text));
        return out;
      },
      "Splits text into sentences.");
  m.def(
      "find_mentions",
      [](const std::string& kg_path, const std::string& text) {
        const KnowledgeGraph kg = LoadKg(kg_path);
        std::vector<std::tuple<std::string, size_t, size_t>> out;
        for (const auto& mention : DictionaryMatcher::Build(kg).FindMentions(text)) {
          out.emplace_back(mention.entity, mention.start, mention.end);
        }
        return out;
      },
      py::arg("kg_path"), py::arg("text"),
      "(entity, start, end) byte spans of lexicon matches.");

  m.def(
      "corpus_eval",
      [](const std::vector<std::tuple<std::string, std::string, std::string, double>>&
             predictions,
         const std::vector<TripleTuple>& gold, const std::vector<int>& ks) {
        std::vector<TriplePrediction> preds;
        for (const auto& [h, r, t, score] : predictions) {
          preds.push_back({{h, r, t}, score, {}});
        }
        std::set<Triple> gold_set;
        for (const auto& g : gold) gold_set.insert(ToTriple(g));
        const CorpusMetrics c = CorpusEval(std::move(preds), gold_set, ks);
        py::dict d;
        d["auc"] = c.auc;
        d["f1"] = c.f1;
        d["precision_at"] = c.precision_at;
        return d;
      },
      py::arg("predictions"), py::arg("gold"), py::arg("ks") = std::vector<int>{});
  m.def(
      "sentence_eval",
      [](const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
        return SentenceDict(SentenceEval(predicted, gold));
      },
      py::arg("predicted"), py::arg("gold"));

  m.def("run", &Run, py::arg("command"), py::arg("config_json"),
        "Runs one pipeline stage; returns its JSON summary as text.");
}
