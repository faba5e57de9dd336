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

#ifndef AMILKIT_TESTS_ORACLES_CORPUS_ORACLE_H_
#define AMILKIT_TESTS_ORACLES_CORPUS_ORACLE_H_

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "amilkit/eval.h"

namespace amilkit::oracle {

struct CorpusOracleResult {
  double auc = 0.0;
  double f1 = 0.0;
  std::map<int, double> precision_at;
};

// Threshold enumeration without sorting. For each cutoff c the predicted
// set is every item with fewer than c items ranked above it, where a ranks
// above b if its score is higher, or equal with a smaller triple. Confusion
// counts are taken directly from that set.
inline CorpusOracleResult BruteForceCorpusEval(
    const std::vector<TriplePrediction>& preds, const std::set<Triple>& gold,
    const std::vector<int>& ks) {
  const size_t n = preds.size();
  std::vector<size_t> above(n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (preds[j].score > preds[i].score ||
          (preds[j].score == preds[i].score && preds[j].triple < preds[i].triple)) {
        ++above[i];
      }
    }
  }
  auto tp_at = [&](size_t cutoff) {
    long tp = 0;
    for (size_t i = 0; i < n; ++i) {
      if (above[i] < cutoff && gold.count(preds[i].triple) > 0) ++tp;
    }
    return tp;
  };
  CorpusOracleResult r;
  const double g = static_cast<double>(gold.size());
  double prev_p = 1.0, prev_r = 0.0;
  for (size_t c = 1; c <= n; ++c) {
    const long tp = tp_at(c);
    const long fp = static_cast<long>(c) - tp;
    const double fn = g - static_cast<double>(tp);
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double rec = static_cast<double>(tp) / (static_cast<double>(tp) + fn);
    r.auc += (rec - prev_r) * (p + prev_p) / 2.0;
    if (p + rec > 0) r.f1 = std::max(r.f1, 2 * p * rec / (p + rec));
    prev_p = p;
    prev_r = rec;
  }
  for (int k : ks) {
    r.precision_at[k] =
        static_cast<double>(tp_at(static_cast<size_t>(k))) / static_cast<double>(k);
  }
  return r;
}

}  // namespace amilkit::oracle

#endif  // AMILKIT_TESTS_ORACLES_CORPUS_ORACLE_H_
