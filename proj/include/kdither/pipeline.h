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

#ifndef KDITHER_PIPELINE_H_
#define KDITHER_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kdither/dataset.h"
#include "kdither/dither.h"
#include "kdither/kmember.h"
#include "kdither/rng.h"

namespace kdither {

enum class Method { kCentroid, kResample, kPermute, kCellDither, kGaussian };

// Accepts "cell-dither" and "cell_dither". nullopt for unknown names.
std::optional<Method> ParseMethod(std::string_view name);
std::string_view MethodName(Method method);

struct AnonymizeParams {
  double w = 1.0;
  double alpha = 1.0 / 3.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct AnonymizedTable {
  Eigen::MatrixXd qi_hat;  // original units
  Eigen::VectorXd response;
  Method method = Method::kResample;
  int k = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double w = 0.0;
};

// Clustered state of one table. Clustering depends on (table, k, w, seed);
// Transform can then be run repeatedly with fresh dither seeds.
class Anonymizer {
 public:
  Anonymizer(const DataTable& table, int k, const AnonymizeParams& params);

  AnonymizedTable Transform(Method method, std::uint64_t dither_seed) const;

  const DataTable& original() const { return original_; }
  const DataTable& standardized() const { return standardized_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const ClusterModel& model() const { return model_; }
  const EmpiricalJoint& joint() const { return joint_; }
  const CellPartition& partition() const { return partition_; }
  const GaussianMixture& mixture() const;
  const AnonymizeParams& params() const { return params_; }

 private:
  // Index tuples (into the standardized joint) per record.
  std::vector<CellIndex> TransformIndices(Method method,
                                          std::uint64_t seed) const;

  DataTable original_;
  DataTable standardized_;
  Standardizer standardizer_;
  AnonymizeParams params_;
  int k_;
  ClusterModel model_;
  EmpiricalJoint joint_;      // standardized values
  EmpiricalJoint raw_joint_;  // original values, same index structure
  CellPartition partition_;
  std::optional<GaussianMixture> mixture_;  // built when alpha > 0
};

AnonymizedTable Anonymize(const DataTable& table, int k, Method method,
                          const AnonymizeParams& params);

// Per cluster, the distinct member rows with their multiplicities n_l(v).
std::vector<std::pair<std::vector<double>, std::int64_t>> ClusterValueCounts(
    const ClusterModel& model, std::size_t cluster);

// With replacement: each record independently takes value v of its cluster
// with probability n_l(v) / n_l (one substream per record). Without: each
// cluster's multiset is randomly permuted over its members (one substream per
// cluster). Rows are in the model's coordinate space.
Eigen::MatrixXd ResampleWithinClusters(const ClusterModel& model,
                                       std::uint64_t seed,
                                       bool with_replacement);

}  // namespace kdither

#endif  // KDITHER_PIPELINE_H_
