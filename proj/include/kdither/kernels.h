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

#ifndef KDITHER_KERNELS_H_
#define KDITHER_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

// Distance kernels over column-major (structure of arrays) point sets.
//
// Every variant evaluates, for each row i,
//
//   out[i] = sum over c in column order of  weight[c] * ((col[c][i] - center[c])^2)
//
// with the same operation order and no fused multiply-add, so all backends
// return bit-identical results. Callers rely on that for reproducible
// arg-min/arg-max selection.
namespace kdither::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view BackendName(Backend backend);

// True when the AVX2 variant was compiled in and the CPU supports it.
bool Avx2Available();

// Backend used by the dispatching entry points. Chosen at first use from the
// CPU, overridable with KDITHER_SIMD=scalar|avx2 or SetBackend().
Backend ActiveBackend();
// Returns false (and leaves the backend unchanged) if unavailable.
bool SetBackend(Backend backend);

void WeightedSqDist(std::span<const double* const> columns,
                    std::span<const double> center,
                    std::span<const double> weights, std::size_t n,
                    double* out);

namespace scalar {
void WeightedSqDist(std::span<const double* const> columns,
                    std::span<const double> center,
                    std::span<const double> weights, std::size_t n,
                    double* out);
}  // namespace scalar

namespace avx2 {
void WeightedSqDist(std::span<const double* const> columns,
                    std::span<const double> center,
                    std::span<const double> weights, std::size_t n,
                    double* out);
}  // namespace avx2

// Index of the smallest entry; ties go to the lowest index. n must be > 0.
std::size_t ArgMin(const double* values, std::size_t n);
// Index of the largest entry; ties go to the lowest index. n must be > 0.
std::size_t ArgMax(const double* values, std::size_t n);

}  // namespace kdither::kernels

#endif  // KDITHER_KERNELS_H_
