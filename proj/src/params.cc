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

#include "amilkit/params.h"

#include <algorithm>
#include <cmath>

namespace amilkit {

int ParameterStore::Add(std::string name, int rows, int cols) {
  Slot s{std::move(name), rows, cols, values_.size()};
  values_.resize(values_.size() + static_cast<size_t>(rows) * cols, 0.0);
  grads_.resize(values_.size(), 0.0);
  slots_.push_back(std::move(s));
  return static_cast<int>(slots_.size()) - 1;
}

void ParameterStore::ZeroGrad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

AdamOptimizer::AdamOptimizer(size_t num_params, const Options& options)
    : options_(options), m_(num_params, 0.0), v_(num_params, 0.0) {}

void AdamOptimizer::Step(ParameterStore& store) {
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = options_.learning_rate;
  auto& w = store.values();
  const auto& g = store.grads();
  for (size_t i = 0; i < w.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * g[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * g[i] * g[i];
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    w[i] -= lr * m_hat / (std::sqrt(v_hat) + options_.epsilon);
  }
}

}  // namespace amilkit
