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

#ifndef KDITHER_EXPERIMENT_H_
#define KDITHER_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "kdither/pipeline.h"
#include "kdither/shiftlearn.h"
#include "kdither/synthetic.h"

namespace kdither {

// Synthetic train/test study: the training sample is drawn untilted and the
// test sample with an exponential tilt on the first quasi-identifier.
struct ExperimentConfig {
  PopulationConfig population;
  std::size_t n_train = 1000;
  std::size_t n_test = 1000;
  double tilt = 0.0;
  std::vector<int> k_grid{2, 20, 200};
  std::vector<Method> methods{Method::kCentroid, Method::kResample,
                              Method::kGaussian};
  std::vector<ShiftEstimator> shifts{ShiftEstimator::kNone};
  std::vector<Coding> codings{Coding::kDummy, Coding::kNumeric};
  double alpha = 1.0 / 3.0;
  double w = 1.0;
  std::uint64_t seed = 0;
  int trials = 20;
  int threads = 1;
};

// Resolved configuration as embedded in every experiment document.
nlohmann::json ConfigJson(const ExperimentConfig& config);

// Runs the full grid. Throws Error with kDomain for an empty k grid or
// method list. The document is a pure function of the config apart from the
// thread count, which it does not record.
nlohmann::json RunExperiment(const ExperimentConfig& config);

}  // namespace kdither

#endif  // KDITHER_EXPERIMENT_H_
