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

#include "kdither/kernels.h"

namespace kdither::kernels::scalar {

void WeightedSqDist(std::span<const double* const> columns,
                    std::span<const double> center,
                    std::span<const double> weights, std::size_t n,
                    double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double* col = columns[c];
    const double mu = center[c];
    const double wt = weights[c];
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = col[i] - mu;
      const double sq = diff * diff;
      out[i] = out[i] + wt * sq;
    }
  }
}

}  // namespace kdither::kernels::scalar
