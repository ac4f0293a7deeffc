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

#include <immintrin.h>

namespace kdither::kernels::avx2 {

// Same per-lane operation sequence as the scalar kernel: sub, mul, mul, add.
void WeightedSqDist(std::span<const double* const> columns,
                    std::span<const double> center,
                    std::span<const double> weights, std::size_t n,
                    double* out) {
  constexpr std::size_t kLanes = 4;
  const std::size_t vec_end = n - n % kLanes;
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    _mm256_storeu_pd(out + i, zero);
  }
  for (std::size_t i = vec_end; i < n; ++i) out[i] = 0.0;

  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double* col = columns[c];
    const __m256d mu = _mm256_set1_pd(center[c]);
    const __m256d wt = _mm256_set1_pd(weights[c]);
    for (std::size_t i = 0; i < vec_end; i += kLanes) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(col + i), mu);
      const __m256d sq = _mm256_mul_pd(diff, diff);
      const __m256d acc = _mm256_loadu_pd(out + i);
      _mm256_storeu_pd(out + i, _mm256_add_pd(acc, _mm256_mul_pd(wt, sq)));
    }
    for (std::size_t i = vec_end; i < n; ++i) {
      const double diff = col[i] - center[c];
      const double sq = diff * diff;
      out[i] = out[i] + weights[c] * sq;
    }
  }
}

}  // namespace kdither::kernels::avx2
