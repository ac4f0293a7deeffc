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

#ifndef KDITHER_DITHER_H_
#define KDITHER_DITHER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kdither/dataset.h"
#include "kdither/kmember.h"
#include "kdither/rng.h"

namespace kdither {

// One interval of a per-dimension partition of the real line. Membership is
// (lower, upper]; the within-cell law is uniform on the finite
// (support_lo, support_hi], which differs from the bounds only on the two
// unbounded edge intervals.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double support_lo = 0.0;
  double support_hi = 0.0;
  int first = 0;  // distinct-value indices covered, first..last
  int last = 0;
};

// Rectangular cells (products of intervals) with per-cluster member counts.
// Cells are keyed by interval index tuples. Before merging, interval i of
// dimension j holds exactly the value v_j(i).
struct CellPartition {
  std::vector<std::vector<Interval>> intervals;
  // Per cluster, sorted (cell, n_l(cell)) with positive counts.
  std::vector<std::vector<std::pair<CellIndex, std::int64_t>>> cluster_cells;
  std::vector<std::int64_t> cluster_sizes;
  bool merged = false;

  std::size_t dims() const { return intervals.size(); }
  // b_j(0) = -inf < b_j(1) < ... < b_j(m) = +inf.
  std::vector<double> Boundaries(std::size_t j) const;
  // Interval of dimension j containing x.
  int LocateInterval(std::size_t j, double x) const;
  CellIndex LocateCell(std::span<const double> xt) const;
  // Count summed over clusters.
  std::int64_t CellCount(const CellIndex& cell) const;
};

struct DitherSample {
  std::vector<double> xt;
  std::size_t record_index = 0;
  int cluster = 0;
};

// Midpoint boundaries between consecutive distinct values. Edge intervals
// carry support [v - delta, b] / (b, v + delta], delta = half the median
// interior interval width (half the value gap when there are two values,
// 0.5 when there is one).
CellPartition BuildCellPartition(const EmpiricalJoint& joint,
                                 const ClusterModel& model);

// Picks a cell of the record's cluster with probability n_l(cell) / n_l,
// then a point uniformly inside it.
DitherSample SampleIntraCluster(std::size_t record, const ClusterModel& model,
                                const CellPartition& partition, Rng& rng);

// One-dimensional relaxation: contiguous cells that belong in full to one
// cluster are merged into a single cell.
CellPartition MergeCells1d(const CellPartition& partition,
                           const ClusterModel& model);

struct GaussianComponent {
  double weight = 0.0;       // n_l / n
  Eigen::VectorXd mean;      // centroid
  Eigen::MatrixXd cov;       // Sigma_l + alpha I
  Eigen::MatrixXd chol;      // lower Cholesky factor of cov
  // Conditioning of coordinate j on coordinates 0..j-1:
  // mean_j + coefficients[j] . (x^{j-1} - mean^{j-1}), variance[j].
  std::vector<Eigen::VectorXd> coefficients;
  std::vector<double> conditional_variance;
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;
  double alpha = 0.0;
  std::size_t dims = 0;
};

// Positive-definite tolerance for the loaded covariances.
inline constexpr double kPositiveDefiniteTolerance = 1e-10;

GaussianMixture BuildGaussianMixture(const ClusterModel& model, double alpha);

// Draw from N(centroid, Sigma_l + alpha I) of the record's cluster.
DitherSample SampleGaussian(std::size_t record, const ClusterModel& model,
                            const GaussianMixture& mixture, Rng& rng);
DitherSample SampleGaussian(std::size_t record, const ClusterModel& model,
                            double alpha, Rng& rng);

}  // namespace kdither

#endif  // KDITHER_DITHER_H_
