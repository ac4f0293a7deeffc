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

#include "kdither/kmember.h"

#include <algorithm>
#include <limits>
#include <ostream>

#include "kdither/error.h"
#include "kdither/kernels.h"
#include "kdither/rng.h"

namespace kdither {

ClusterModel SummarizeClusters(const DataTable& table,
                               const std::vector<int>& assignment, int k,
                               double w) {
  if (assignment.size() != table.rows()) {
    throw Error(ErrorCode::kShape, "assignment does not cover the table");
  }
  int c = 0;
  for (int a : assignment) {
    if (a < 0) throw Error(ErrorCode::kDomain, "negative cluster index");
    c = std::max(c, a + 1);
  }
  ClusterModel model;
  model.assignment = assignment;
  model.k = k;
  model.w = w;
  model.clusters.resize(static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    model.clusters[static_cast<std::size_t>(assignment[i])].members.push_back(i);
  }
  const auto d = static_cast<Eigen::Index>(table.dims());
  for (auto& cluster : model.clusters) {
    const auto m = static_cast<Eigen::Index>(cluster.members.size());
    cluster.values.resize(m, d);
    cluster.centroid_x = Eigen::VectorXd::Zero(d);
    cluster.centroid_y = 0.0;
    cluster.covariance = Eigen::MatrixXd::Zero(d, d);
    if (m == 0) continue;
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto i = static_cast<Eigen::Index>(cluster.members[r]);
      cluster.values.row(r) = table.qi().row(i);
      cluster.centroid_x += table.qi().row(i).transpose();
      cluster.centroid_y += table.response()(i);
    }
    cluster.centroid_x /= static_cast<double>(m);
    cluster.centroid_y /= static_cast<double>(m);
    const Eigen::MatrixXd centered =
        cluster.values.rowwise() - cluster.centroid_x.transpose();
    cluster.covariance = (centered.transpose() * centered) /
                         static_cast<double>(m);
    // Exact symmetry.
    cluster.covariance =
        0.5 * (cluster.covariance + cluster.covariance.transpose());
  }
  return model;
}

double Distortion(std::span<const double> x, double y,
                  std::span<const double> xbar, double ybar, double w) {
  if (x.size() != xbar.size()) {
    throw Error(ErrorCode::kShape, "distortion operands differ in dimension");
  }
  if (!(w > 0.0)) throw Error(ErrorCode::kDomain, "distortion weight must be > 0");
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double t = x[j] - xbar[j];
    sum += t * t;
  }
  const double ty = y - ybar;
  return sum + w * (ty * ty);
}

namespace {

// Unassigned records in ascending index order, stored column-wise so the
// distance kernel streams over them.
class ActiveSet {
 public:
  ActiveSet(const DataTable& table) : dims_(table.dims() + 1) {
    const std::size_t n = table.rows();
    columns_.resize(dims_);
    for (std::size_t j = 0; j + 1 < dims_; ++j) {
      const double* src = table.qi().col(static_cast<Eigen::Index>(j)).data();
      columns_[j].assign(src, src + n);
    }
    columns_[dims_ - 1].assign(table.response().data(),
                               table.response().data() + n);
    ids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) ids_[i] = i;
    distances_.resize(n);
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t id(std::size_t pos) const { return ids_[pos]; }

  const double* Distances(std::span<const double> center,
                          std::span<const double> weights) {
    pointers_.resize(dims_);
    for (std::size_t j = 0; j < dims_; ++j) pointers_[j] = columns_[j].data();
    kernels::WeightedSqDist(pointers_, center, weights, ids_.size(),
                            distances_.data());
    return distances_.data();
  }

  std::size_t PositionOf(std::size_t record) const {
    return static_cast<std::size_t>(
        std::lower_bound(ids_.begin(), ids_.end(), record) - ids_.begin());
  }

  void Erase(std::size_t pos) {
    for (auto& col : columns_) col.erase(col.begin() + static_cast<long>(pos));
    ids_.erase(ids_.begin() + static_cast<long>(pos));
  }

 private:
  std::size_t dims_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::size_t> ids_;
  std::vector<double> distances_;
  std::vector<const double*> pointers_;
};

}  // namespace

ClusterModel GreedyKMember(const DataTable& table, int k, double w,
                           std::uint64_t seed) {
  const std::size_t n = table.rows();
  if (k < 2) throw Error(ErrorCode::kDomain, "k must be at least 2");
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::kInfeasible,
                "infeasible k: k = " + std::to_string(k) + " exceeds n = " +
                    std::to_string(n));
  }
  if (!(w > 0.0)) throw Error(ErrorCode::kDomain, "distortion weight must be > 0");

  const std::size_t d = table.dims();
  const std::size_t num_clusters = n / static_cast<std::size_t>(k);
  std::vector<double> weights(d + 1, 1.0);
  weights[d] = w;

  auto point = [&table, d](std::size_t i) {
    std::vector<double> p(d + 1);
    for (std::size_t j = 0; j < d; ++j) {
      p[j] = table.qi()(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(j));
    }
    p[d] = table.response()(static_cast<Eigen::Index>(i));
    return p;
  };

  std::vector<int> assignment(n, -1);
  std::vector<std::vector<double>> centroids;
  ActiveSet active(table);

  Rng rng = Rng::Substream(seed, Stream::kClustering, 0);
  std::size_t next_seed = static_cast<std::size_t>(rng.Below(n));

  for (std::size_t ell = 0; ell < num_clusters; ++ell) {
    if (ell > 0) {
      const double* dist = active.Distances(centroids.back(), weights);
      next_seed = active.id(kernels::ArgMax(dist, active.size()));
    }
    std::vector<double> sum = point(next_seed);
    std::vector<double> centroid = sum;
    std::size_t size = 1;
    assignment[next_seed] = static_cast<int>(ell);
    active.Erase(active.PositionOf(next_seed));

    while (size < static_cast<std::size_t>(k)) {
      const double* dist = active.Distances(centroid, weights);
      const std::size_t pos = kernels::ArgMin(dist, active.size());
      const std::size_t record = active.id(pos);
      assignment[record] = static_cast<int>(ell);
      active.Erase(pos);
      const std::vector<double> p = point(record);
      ++size;
      for (std::size_t j = 0; j <= d; ++j) {
        sum[j] += p[j];
        centroid[j] = sum[j] / static_cast<double>(size);
      }
    }
    centroids.push_back(std::move(centroid));
  }

  // Leftovers (n mod k records) join the nearest centroid as it stood after
  // growth, so the result does not depend on leftover order.
  for (std::size_t pos = 0; pos < active.size(); ++pos) {
    const std::size_t record = active.id(pos);
    const std::vector<double> p = point(record);
    double best = std::numeric_limits<double>::infinity();
    int best_cluster = 0;
    for (std::size_t ell = 0; ell < centroids.size(); ++ell) {
      double dist = 0.0;
      for (std::size_t j = 0; j <= d; ++j) {
        const double diff = p[j] - centroids[ell][j];
        const double sq = diff * diff;
        dist = dist + weights[j] * sq;
      }
      if (dist < best) {
        best = dist;
        best_cluster = static_cast<int>(ell);
      }
    }
    assignment[record] = best_cluster;
  }

  return SummarizeClusters(table, assignment, k, w);
}

ValidationReport ValidateKAnonymous(const ClusterModel& model) {
  ValidationReport report;
  auto fail = [&report](std::string message) {
    report.ok = false;
    report.violations.push_back(std::move(message));
  };
  const std::size_t n = model.records();
  std::vector<int> seen(n, 0);
  for (std::size_t ell = 0; ell < model.clusters.size(); ++ell) {
    const auto& cluster = model.clusters[ell];
    const std::string name = "cluster " + std::to_string(ell + 1);
    if (cluster.size() < static_cast<std::size_t>(model.k)) {
      fail(name + " has " + std::to_string(cluster.size()) +
           " members, fewer than k = " + std::to_string(model.k));
    }
    for (std::size_t record : cluster.members) {
      if (record >= n) {
        fail(name + " lists record " + std::to_string(record) +
             " outside the table");
        continue;
      }
      ++seen[record];
      if (model.assignment[record] != static_cast<int>(ell)) {
        fail(name + " lists record " + std::to_string(record) +
             " assigned elsewhere");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == 0) fail("record " + std::to_string(i) + " is unassigned");
    if (seen[i] > 1) {
      fail("record " + std::to_string(i) + " appears in " +
           std::to_string(seen[i]) + " clusters");
    }
  }
  if (model.k >= 1 && model.clusters.size() > n / static_cast<std::size_t>(model.k)) {
    fail("more than floor(n / k) clusters");
  }
  return report;
}

double TotalDistortion(const ClusterModel& model, const DataTable& table) {
  if (model.records() != table.rows()) {
    throw Error(ErrorCode::kShape, "assignment does not cover the table");
  }
  double total = 0.0;
  std::vector<double> x(table.dims());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto& cluster =
        model.clusters[static_cast<std::size_t>(model.assignment[i])];
    for (std::size_t j = 0; j < table.dims(); ++j) {
      x[j] = table.qi()(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(j));
    }
    total += Distortion(
        x, table.response()(static_cast<Eigen::Index>(i)),
        std::span<const double>(cluster.centroid_x.data(),
                                static_cast<std::size_t>(cluster.centroid_x.size())),
        cluster.centroid_y, model.w);
  }
  return total;
}

void WriteAssignmentCsv(std::ostream& out, const ClusterModel& model,
                        const std::vector<std::string>& record_ids) {
  out << "record_id,cluster_index\n";
  for (std::size_t i = 0; i < model.records(); ++i) {
    out << record_ids.at(i) << ',' << model.assignment[i] + 1 << '\n';
  }
}

}  // namespace kdither
