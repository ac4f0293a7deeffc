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

#ifndef KDITHER_REID_H_
#define KDITHER_REID_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "kdither/dataset.h"
#include "kdither/pipeline.h"
#include "kdither/rng.h"

namespace kdither {

// For each original record, an anonymized record at minimum Euclidean
// distance in the original table's standardized coordinates; ties are broken
// uniformly at random. A match is always returned.
std::vector<std::size_t> MatchMinDistance(const DataTable& original,
                                          const Eigen::MatrixXd& anon_qi,
                                          const Standardizer& standardizer,
                                          Rng& rng);
std::vector<std::size_t> MatchMinDistance(const DataTable& original,
                                          const AnonymizedTable& anon,
                                          Rng& rng);

// One equivalence class: a distinct quasi-identifier tuple of the original.
struct ClassFrequency {
  std::vector<double> tuple;
  std::int64_t size = 0;
  std::int64_t correct = 0;  // over all trials and members
  double frequency = 0.0;    // correct / (trials * size)
};

struct ReidReport {
  std::vector<ClassFrequency> classes;
  std::int64_t total_correct = 0;
  std::int64_t records = 0;
  int trials = 0;
  int k = 0;
  Method method = Method::kResample;
  double average = 0.0;  // total_correct / (trials * records)

  double Nominal() const { return 1.0 / k; }
  // Three binomial standard deviations of an average of `trials` draws at 1/k.
  double Band() const;
};

// Clusters once, then runs `trials` independent dither + match rounds.
// Trial t uses dither and match substreams derived from (params.seed, t);
// trials run on params.threads workers with an order-independent reduction.
ReidReport ReidTrials(const DataTable& original, int k, Method method,
                      const AnonymizeParams& params, int trials);
ReidReport ReidTrials(const Anonymizer& anonymizer, Method method, int trials,
                      std::uint64_t seed, int threads);

// tuple columns..., size, correct, frequency
void WriteClassFrequencyCsv(std::ostream& out, const ReidReport& report,
                            const std::vector<std::string>& qi_names);

}  // namespace kdither

#endif  // KDITHER_REID_H_
