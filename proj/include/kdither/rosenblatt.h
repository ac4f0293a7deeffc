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

#ifndef KDITHER_ROSENBLATT_H_
#define KDITHER_ROSENBLATT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "kdither/dataset.h"
#include "kdither/dither.h"

namespace kdither {

// Coordinates in (0, 1].
struct UniformVector {
  std::vector<double> u;
  std::size_t record_index = 0;
};

// Gaussian CDF Phi(z; mean, variance) through erfc.
double NormalCdf(double z, double mean, double variance);
double NormalLogPdf(double z, double mean, double variance);

// Forward map of an intra-cluster dither sample. Conditional cell masses are
// the empirical conditional PMF of the prefix cells; within a cell the CDF is
// linear across the cell's support.
UniformVector ForwardCellUniform(const DitherSample& sample,
                                 const CellPartition& partition,
                                 const EmpiricalJoint& joint);

struct ConditionalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Law of coordinate j of component `cluster` given coordinates 0..j-1.
ConditionalMoments ConditionGaussian(const GaussianMixture& mixture,
                                     std::size_t cluster, std::size_t j,
                                     std::span<const double> prefix);

// Forward map under the Gaussian mixture dither, with cluster posteriors
// updated coordinate by coordinate in log space.
UniformVector ForwardGaussian(const DitherSample& sample,
                              const GaussianMixture& mixture);

// Sequential generalized inverse of the empirical conditional CDFs.
CellIndex InverseEmpiricalIndex(const UniformVector& u,
                                const EmpiricalJoint& joint);
std::vector<double> InverseEmpirical(const UniformVector& u,
                                     const EmpiricalJoint& joint);

}  // namespace kdither

#endif  // KDITHER_ROSENBLATT_H_
