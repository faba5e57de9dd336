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

#ifndef AMILKIT_PARAMS_H_
#define AMILKIT_PARAMS_H_

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace amilkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

// Every trainable tensor lives in one flat array (column-major per tensor),
// with a parallel gradient array. Slots are registered once; maps handed out
// afterwards stay valid because the arrays never grow again.
class ParameterStore {
 public:
  struct Slot {
    std::string name;
    int rows = 0;
    int cols = 0;
    size_t offset = 0;
  };

  // Returns the slot id.
  int Add(std::string name, int rows, int cols);

  MatrixMap value(int slot) { return Map(values_, slot); }
  ConstMatrixMap value(int slot) const { return Map(values_, slot); }
  MatrixMap grad(int slot) { return Map(grads_, slot); }
  ConstMatrixMap grad(int slot) const { return Map(grads_, slot); }

  void ZeroGrad();

  const std::vector<Slot>& slots() const { return slots_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& grads() { return grads_; }
  const std::vector<double>& grads() const { return grads_; }
  size_t size() const { return values_.size(); }

 private:
  MatrixMap Map(std::vector<double>& data, int slot) {
    const Slot& s = slots_[slot];
    return MatrixMap(data.data() + s.offset, s.rows, s.cols);
  }
  ConstMatrixMap Map(const std::vector<double>& data, int slot) const {
    const Slot& s = slots_[slot];
    return ConstMatrixMap(data.data() + s.offset, s.rows, s.cols);
  }

  std::vector<Slot> slots_;
  std::vector<double> values_;
  std::vector<double> grads_;
};

// Adam with bias correction.
class AdamOptimizer {
 public:
  struct Options {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  AdamOptimizer(size_t num_params, const Options& options);

  // Applies one update from store.grads() to store.values().
  void Step(ParameterStore& store);

  long steps() const { return step_; }

 private:
  Options options_;
  std::vector<double> m_;
  std::vector<double> v_;
  long step_ = 0;
};

}  // namespace amilkit

#endif  // AMILKIT_PARAMS_H_
