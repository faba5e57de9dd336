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

#ifndef AMILKIT_RANDOM_H_
#define AMILKIT_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace amilkit {

// Portable seeded generator. std::mt19937_64 has a standard-mandated output
// sequence; the distributions below are hand-rolled because the standard
// library's are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);

  // Uniform in [0, 1) with 53 bits of mantissa.
  double UniformDouble();

  // Standard normal via Box-Muller (no cached second value).
  double Normal();

  bool Bernoulli(double p) { return UniformDouble() < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer.
uint64_t MixBits(uint64_t x);

// Seed for a sub-stream, e.g. per-epoch per-bag-key reshuffling.
uint64_t DeriveSeed(uint64_t base, uint64_t stream, std::string_view key = {});

}  // namespace amilkit

#endif  // AMILKIT_RANDOM_H_
