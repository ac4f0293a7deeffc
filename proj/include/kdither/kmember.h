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

#ifndef KDITHER_KMEMBER_H_
#define KDITHER_KMEMBER_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kdither/dataset.h"

namespace kdither {

struct Cluster {
  std::vector<std::size_t> members;  // ascending record indices
  Eigen::MatrixXd values;            // member quasi-identifier rows, V_l
  Eigen::VectorXd centroid_x;
  double centroid_y = 0.0;
  Eigen::MatrixXd covariance;  // population form (denominator n_l)

  std::size_t size() const { return members.size(); }
};

// k-member clustering result. Cluster indices are 0-based internally and
// 1-based in exported files.
struct ClusterModel {
  std::vector<int> assignment;
  std::vector<Cluster> clusters;
  int k = 0;
  double w = 1.0;

  std::size_t records() const { return assignment.size(); }
  std::size_t num_clusters() const { return clusters.size(); }
};

// Builds member lists, V_l, centroids and covariances from an assignment.
// Does not check k-anonymity; see ValidateKAnonymous.
ClusterModel SummarizeClusters(const DataTable& table,
                               const std::vector<int>& assignment, int k,
                               double w);

// ||x - xbar||^2 + w (y - ybar)^2.
double Distortion(std::span<const double> x, double y,
                  std::span<const double> xbar, double ybar, double w);

// Greedy k-member clustering with c = floor(n / k) clusters. The first
// cluster is seeded at a random record (drawn from `seed`); each cluster grows
// by the unassigned record nearest its running centroid until it has k
// members; the next seed is the unassigned record farthest from the previous
// centroid. Leftover records join the cluster with the nearest centroid.
// Ties go to the lowest record index. Expects a standardized table.
ClusterModel GreedyKMember(const DataTable& table, int k, double w,
                           std::uint64_t seed);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ValidationReport ValidateKAnonymous(const ClusterModel& model);

double TotalDistortion(const ClusterModel& model, const DataTable& table);

// record_id,cluster_index rows for audit.
void WriteAssignmentCsv(std::ostream& out, const ClusterModel& model,
                        const std::vector<std::string>& record_ids);

}  // namespace kdither

#endif  // KDITHER_KMEMBER_H_
