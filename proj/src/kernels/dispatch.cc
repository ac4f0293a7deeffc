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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kdither/kernels.h"

namespace kdither::kernels {
namespace {

bool CpuHasAvx2() {
#if defined(KDITHER_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend InitialBackend() {
  const char* env = std::getenv("KDITHER_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Backend::kScalar;
  }
  return CpuHasAvx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& BackendSlot() {
  static std::atomic<Backend> slot{InitialBackend()};
  return slot;
}

}  // namespace

std::string_view BackendName(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

bool Avx2Available() { return CpuHasAvx2(); }

Backend ActiveBackend() { return BackendSlot().load(std::memory_order_relaxed); }

bool SetBackend(Backend backend) {
  if (backend == Backend::kAvx2 && !Avx2Available()) return false;
  BackendSlot().store(backend, std::memory_order_relaxed);
  return true;
}

void WeightedSqDist(std::span<const double* const> columns,
                    std::span<const double> center,
                    std::span<const double> weights, std::size_t n,
                    double* out) {
#if defined(KDITHER_HAVE_AVX2)
  if (ActiveBackend() == Backend::kAvx2) {
    avx2::WeightedSqDist(columns, center, weights, n, out);
    return;
  }
#endif
  scalar::WeightedSqDist(columns, center, weights, n, out);
}

#if !defined(KDITHER_HAVE_AVX2)
namespace avx2 {
void WeightedSqDist(std::span<const double* const> columns,
                    std::span<const double> center,
                    std::span<const double> weights, std::size_t n,
                    double* out) {
  scalar::WeightedSqDist(columns, center, weights, n, out);
}
}  // namespace avx2
#endif

std::size_t ArgMin(const double* values, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

std::size_t ArgMax(const double* values, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace kdither::kernels
