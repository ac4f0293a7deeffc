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

#include "kdither/dither.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "kdither/error.h"

namespace kdither {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size();
  return m % 2 == 1 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

std::vector<Interval> BuildIntervals(const std::vector<double>& values) {
  const std::size_t m = values.size();
  std::vector<double> bounds(m + 1);
  bounds[0] = -kInf;
  bounds[m] = kInf;
  for (std::size_t i = 1; i < m; ++i) {
    bounds[i] = 0.5 * (values[i - 1] + values[i]);
    if (!(bounds[i] > bounds[i - 1]) || !(bounds[i] >= values[i - 1]) ||
        !(bounds[i] < values[i])) {
      throw Error(ErrorCode::kPartition,
                  "distinct values too close to separate by midpoints");
    }
  }
  double delta = 0.5;
  if (m == 2) {
    delta = 0.5 * (values[1] - values[0]);
  } else if (m > 2) {
    std::vector<double> widths;
    for (std::size_t i = 2; i < m; ++i) widths.push_back(bounds[i] - bounds[i - 1]);
    delta = 0.5 * Median(std::move(widths));
  }
  std::vector<Interval> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    Interval& iv = out[i];
    iv.lower = bounds[i];
    iv.upper = bounds[i + 1];
    iv.support_lo = std::isfinite(iv.lower) ? iv.lower : values[i] - delta;
    iv.support_hi = std::isfinite(iv.upper) ? iv.upper : values[i] + delta;
    iv.first = static_cast<int>(i);
    iv.last = static_cast<int>(i);
  }
  return out;
}

}  // namespace

std::vector<double> CellPartition::Boundaries(std::size_t j) const {
  std::vector<double> b;
  b.reserve(intervals[j].size() + 1);
  b.push_back(intervals[j].front().lower);
  for (const auto& iv : intervals[j]) b.push_back(iv.upper);
  return b;
}

int CellPartition::LocateInterval(std::size_t j, double x) const {
  const auto& ivs = intervals[j];
  // First interval whose upper bound is >= x.
  auto it = std::lower_bound(
      ivs.begin(), ivs.end(), x,
      [](const Interval& iv, double value) { return iv.upper < value; });
  if (it == ivs.end() || !(x > it->lower)) {
    throw Error(ErrorCode::kPartition, "point outside all cells");
  }
  return static_cast<int>(it - ivs.begin());
}

CellIndex CellPartition::LocateCell(std::span<const double> xt) const {
  if (xt.size() != dims()) {
    throw Error(ErrorCode::kShape, "point width does not match partition");
  }
  CellIndex cell(dims());
  for (std::size_t j = 0; j < dims(); ++j) cell[j] = LocateInterval(j, xt[j]);
  return cell;
}

std::int64_t CellPartition::CellCount(const CellIndex& cell) const {
  std::int64_t total = 0;
  for (const auto& cells : cluster_cells) {
    auto it = std::lower_bound(
        cells.begin(), cells.end(), cell,
        [](const auto& entry, const CellIndex& key) { return entry.first < key; });
    if (it != cells.end() && it->first == cell) total += it->second;
  }
  return total;
}

CellPartition BuildCellPartition(const EmpiricalJoint& joint,
                                 const ClusterModel& model) {
  CellPartition partition;
  for (std::size_t j = 0; j < joint.dims(); ++j) {
    partition.intervals.push_back(BuildIntervals(joint.values(j)));
  }
  const auto d = static_cast<Eigen::Index>(joint.dims());
  std::map<CellIndex, std::int64_t> totals;
  for (const auto& cluster : model.clusters) {
    if (cluster.values.cols() != d) {
      throw Error(ErrorCode::kShape, "cluster values do not match joint width");
    }
    std::map<CellIndex, std::int64_t> counts;
    std::vector<double> row(joint.dims());
    for (Eigen::Index r = 0; r < cluster.values.rows(); ++r) {
      for (Eigen::Index j = 0; j < d; ++j) row[j] = cluster.values(r, j);
      auto cell = joint.Locate(row);
      if (!cell) {
        throw Error(ErrorCode::kPartition,
                    "cluster value is not an observed value of the joint");
      }
      ++counts[*cell];
      ++totals[*cell];
    }
    partition.cluster_cells.emplace_back(counts.begin(), counts.end());
    partition.cluster_sizes.push_back(
        static_cast<std::int64_t>(cluster.size()));
  }
  // Sum over clusters must reproduce the joint counts cell by cell.
  if (totals.size() != joint.counts().size()) {
    throw Error(ErrorCode::kPartition, "cluster cells do not cover the joint");
  }
  for (const auto& [cell, count] : joint.counts()) {
    auto it = totals.find(cell);
    if (it == totals.end() || it->second != count) {
      throw Error(ErrorCode::kPartition,
                  "cluster cell counts disagree with the joint");
    }
  }
  return partition;
}

DitherSample SampleIntraCluster(std::size_t record, const ClusterModel& model,
                                const CellPartition& partition, Rng& rng) {
  if (record >= model.records()) {
    throw Error(ErrorCode::kDomain, "record not in model");
  }
  const int ell = model.assignment[record];
  const auto& cells = partition.cluster_cells[static_cast<std::size_t>(ell)];
  const auto n_ell = partition.cluster_sizes[static_cast<std::size_t>(ell)];
  auto r = static_cast<std::int64_t>(rng.Below(static_cast<uint64_t>(n_ell)));
  std::size_t chosen = 0;
  while (r >= cells[chosen].second) {
    r -= cells[chosen].second;
    ++chosen;
  }
  const CellIndex& cell = cells[chosen].first;
  DitherSample sample;
  sample.record_index = record;
  sample.cluster = ell;
  sample.xt.resize(partition.dims());
  for (std::size_t j = 0; j < partition.dims(); ++j) {
    const Interval& iv = partition.intervals[j][static_cast<std::size_t>(cell[j])];
    const double lo = iv.support_lo;
    const double hi = iv.support_hi;
    // Uniform on (lo, hi].
    double x = hi - (hi - lo) * rng.Uniform();
    if (!(x > lo)) x = hi;
    sample.xt[j] = x;
  }
  return sample;
}

CellPartition MergeCells1d(const CellPartition& partition,
                           const ClusterModel& model) {
  if (partition.dims() != 1) {
    throw Error(ErrorCode::kDimension, "cell merging is defined for d = 1 only");
  }
  if (partition.cluster_cells.size() != model.num_clusters()) {
    throw Error(ErrorCode::kShape, "partition and model disagree on clusters");
  }
  const auto& ivs = partition.intervals[0];
  const std::size_t m = ivs.size();
  // Owner cluster of each interval if it belongs in full to one cluster,
  // -1 if split, -2 if empty.
  std::vector<int> owner(m, -2);
  for (std::size_t ell = 0; ell < partition.cluster_cells.size(); ++ell) {
    for (const auto& [cell, count] : partition.cluster_cells[ell]) {
      int& o = owner[static_cast<std::size_t>(cell[0])];
      o = (o == -2) ? static_cast<int>(ell) : -1;
    }
  }
  CellPartition out;
  out.merged = true;
  out.cluster_sizes = partition.cluster_sizes;
  out.intervals.emplace_back();
  auto& merged = out.intervals[0];
  std::vector<int> merged_index(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool extend = i > 0 && owner[i] >= 0 && owner[i] == owner[i - 1];
    if (extend) {
      Interval& back = merged.back();
      back.upper = ivs[i].upper;
      back.support_hi = ivs[i].support_hi;
      back.last = ivs[i].last;
    } else {
      merged.push_back(ivs[i]);
    }
    merged_index[i] = static_cast<int>(merged.size()) - 1;
  }
  out.cluster_cells.resize(partition.cluster_cells.size());
  for (std::size_t ell = 0; ell < partition.cluster_cells.size(); ++ell) {
    std::map<CellIndex, std::int64_t> counts;
    for (const auto& [cell, count] : partition.cluster_cells[ell]) {
      counts[CellIndex{merged_index[static_cast<std::size_t>(cell[0])]}] += count;
    }
    out.cluster_cells[ell].assign(counts.begin(), counts.end());
  }
  return out;
}

GaussianMixture BuildGaussianMixture(const ClusterModel& model, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kDomain, "alpha must be positive");
  }
  GaussianMixture mixture;
  mixture.alpha = alpha;
  if (model.clusters.empty()) return mixture;
  const auto d = model.clusters.front().centroid_x.size();
  mixture.dims = static_cast<std::size_t>(d);
  const double n = static_cast<double>(model.records());
  for (const auto& cluster : model.clusters) {
    GaussianComponent comp;
    comp.weight = static_cast<double>(cluster.size()) / n;
    comp.mean = cluster.centroid_x;
    comp.cov = cluster.covariance +
               alpha * Eigen::MatrixXd::Identity(d, d);
    Eigen::LLT<Eigen::MatrixXd> llt(comp.cov);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kInternal, "loaded covariance is not positive definite");
    }
    comp.chol = llt.matrixL();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == 0) {
        comp.coefficients.emplace_back();
        comp.conditional_variance.push_back(comp.cov(0, 0));
      } else {
        const Eigen::MatrixXd lead = comp.cov.topLeftCorner(j, j);
        const Eigen::VectorXd cross = comp.cov.col(j).head(j);
        Eigen::LLT<Eigen::MatrixXd> lead_llt(lead);
        Eigen::VectorXd beta = lead_llt.solve(cross);
        comp.coefficients.push_back(beta);
        comp.conditional_variance.push_back(comp.cov(j, j) - cross.dot(beta));
      }
      if (!(comp.conditional_variance.back() > kPositiveDefiniteTolerance)) {
        throw Error(ErrorCode::kInternal,
                    "conditional variance below positive-definite tolerance");
      }
    }
    mixture.components.push_back(std::move(comp));
  }
  return mixture;
}

DitherSample SampleGaussian(std::size_t record, const ClusterModel& model,
                            const GaussianMixture& mixture, Rng& rng) {
  if (record >= model.records()) {
    throw Error(ErrorCode::kDomain, "record not in model");
  }
  const int ell = model.assignment[record];
  const auto& comp = mixture.components[static_cast<std::size_t>(ell)];
  const auto d = comp.mean.size();
  Eigen::VectorXd z(d);
  for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.Normal();
  const Eigen::VectorXd x = comp.mean + comp.chol * z;
  DitherSample sample;
  sample.record_index = record;
  sample.cluster = ell;
  sample.xt.assign(x.data(), x.data() + d);
  return sample;
}

DitherSample SampleGaussian(std::size_t record, const ClusterModel& model,
                            double alpha, Rng& rng) {
  return SampleGaussian(record, model, BuildGaussianMixture(model, alpha), rng);
}

}  // namespace kdither
