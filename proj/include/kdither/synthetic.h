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

#ifndef KDITHER_SYNTHETIC_H_
#define KDITHER_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kdither/dataset.h"

namespace kdither {

// Synthetic population of discrete quasi-identifiers and a cost-like
// response. Quasi-identifier j takes levels 0..levels[j]-1 obtained by
// thresholding an equicorrelated latent Gaussian (correlation `dependence`)
// at quantiles u^skew of a uniform grid; skew > 1 moves mass to high levels.
// The response is a nonlinear function of the levels plus noise whose scale
// grows with the first quasi-identifier.
struct PopulationConfig {
  std::vector<int> levels{8, 2, 6, 5};
  double dependence = 0.3;
  double skew = 1.3;
  double noise = 1.0;
};

// Draws n records. tilt != 0 applies exponential tilting exp(tilt * x_0) to
// the first quasi-identifier (by rejection), which shifts the covariate
// distribution while leaving y | x unchanged.
DataTable GeneratePopulation(const PopulationConfig& config, std::size_t n,
                             double tilt, std::uint64_t seed);

}  // namespace kdither

#endif  // KDITHER_SYNTHETIC_H_
