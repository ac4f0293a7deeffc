//
// Copyright 2026 The kdither Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef KDITHER_RNG_H_
#define KDITHER_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace kdither {

// SplitMix64 finalizer. Used to derive independent substream seeds.
uint64_t MixSeed(uint64_t a, uint64_t b);

// Stream tags keep substreams of different pipeline stages apart.
enum class Stream : uint64_t {
  kClustering = 1,
  kDither = 2,
  kResample = 3,
  kPermute = 4,
  kMatch = 5,
  kTrial = 6,
  kSynthetic = 7,
};

class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Deterministic substream for (master seed, stage, index). Output of a
  // substream does not depend on how many other substreams were consumed.
  static Rng Substream(uint64_t master, Stream stream, uint64_t index);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform integer on [0, n). n must be positive.
  uint64_t Below(uint64_t n);
  double Normal();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace kdither

#endif  // KDITHER_RNG_H_
