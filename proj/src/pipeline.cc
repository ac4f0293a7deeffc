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

#include "kdither/pipeline.h"

#include <algorithm>
#include <map>

#include "kdither/error.h"
#include "kdither/parallel.h"
#include "kdither/rosenblatt.h"

namespace kdither {
namespace {

void ValidateK(int k, std::size_t n) {
  if (k < 2) throw Error(ErrorCode::kDomain, "k must be at least 2");
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::kInfeasible,
                "infeasible k: k = " + std::to_string(k) + " exceeds n = " +
                    std::to_string(n));
  }
}

// Fisher-Yates with the library's own integer draws, so the permutation is
// a function of the substream alone.
template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.Below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

std::optional<Method> ParseMethod(std::string_view name) {
  if (name == "centroid") return Method::kCentroid;
  if (name == "resample") return Method::kResample;
  if (name == "permute") return Method::kPermute;
  if (name == "cell-dither" || name == "cell_dither") return Method::kCellDither;
  if (name == "gaussian") return Method::kGaussian;
  return std::nullopt;
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kCentroid: return "centroid";
    case Method::kResample: return "resample";
    case Method::kPermute: return "permute";
    case Method::kCellDither: return "cell_dither";
    case Method::kGaussian: return "gaussian";
  }
  return "resample";
}

Anonymizer::Anonymizer(const DataTable& table, int k,
                       const AnonymizeParams& params)
    : original_(table),
      standardized_(table),
      params_(params),
      k_(k) {
  ValidateK(k, table.rows());
  auto [standardized, standardizer] = Standardize(table);
  standardized_ = std::move(standardized);
  standardizer_ = std::move(standardizer);
  model_ = GreedyKMember(standardized_, k, params.w, params.seed);
  joint_ = EmpiricalJoint::Build(standardized_.qi());
  raw_joint_ = EmpiricalJoint::Build(original_.qi());
  bool same = raw_joint_.counts() == joint_.counts();
  for (std::size_t j = 0; same && j < joint_.dims(); ++j) {
    same = raw_joint_.values(j).size() == joint_.values(j).size();
  }
  if (!same) {
    throw Error(ErrorCode::kPartition,
                "standardization merged distinct quasi-identifier values");
  }
  partition_ = BuildCellPartition(joint_, model_);
  if (params.alpha > 0.0) mixture_ = BuildGaussianMixture(model_, params.alpha);
}

const GaussianMixture& Anonymizer::mixture() const {
  if (!mixture_) throw Error(ErrorCode::kDomain, "alpha must be positive");
  return *mixture_;
}

std::vector<CellIndex> Anonymizer::TransformIndices(Method method,
                                                    std::uint64_t seed) const {
  const std::size_t n = original_.rows();
  std::vector<CellIndex> out(n);
  switch (method) {
    case Method::kResample: {
      ParallelFor(n, params_.threads, [&](std::size_t i) {
        Rng rng = Rng::Substream(seed, Stream::kResample, i);
        const auto ell = static_cast<std::size_t>(model_.assignment[i]);
        const auto& cells = partition_.cluster_cells[ell];
        auto r = static_cast<std::int64_t>(
            rng.Below(static_cast<uint64_t>(partition_.cluster_sizes[ell])));
        std::size_t pos = 0;
        while (r >= cells[pos].second) {
          r -= cells[pos].second;
          ++pos;
        }
        out[i] = cells[pos].first;
      });
      break;
    }
    case Method::kPermute: {
      ParallelFor(model_.num_clusters(), params_.threads, [&](std::size_t ell) {
        Rng rng = Rng::Substream(seed, Stream::kPermute, ell);
        const auto& members = model_.clusters[ell].members;
        std::vector<CellIndex> values;
        values.reserve(members.size());
        for (std::size_t record : members) {
          values.push_back(*joint_.Locate(standardized_.Row(record)));
        }
        Shuffle(values, rng);
        for (std::size_t r = 0; r < members.size(); ++r) {
          out[members[r]] = std::move(values[r]);
        }
      });
      break;
    }
    case Method::kCellDither: {
      ParallelFor(n, params_.threads, [&](std::size_t i) {
        Rng rng = Rng::Substream(seed, Stream::kDither, i);
        const DitherSample sample = SampleIntraCluster(i, model_, partition_, rng);
        out[i] = InverseEmpiricalIndex(
            ForwardCellUniform(sample, partition_, joint_), joint_);
      });
      break;
    }
    case Method::kGaussian: {
      const GaussianMixture& mix = mixture();
      ParallelFor(n, params_.threads, [&](std::size_t i) {
        Rng rng = Rng::Substream(seed, Stream::kDither, i);
        const DitherSample sample = SampleGaussian(i, model_, mix, rng);
        out[i] = InverseEmpiricalIndex(ForwardGaussian(sample, mix), joint_);
      });
      break;
    }
    case Method::kCentroid:
      throw Error(ErrorCode::kInternal, "centroid method has no index form");
  }
  return out;
}

AnonymizedTable Anonymizer::Transform(Method method,
                                      std::uint64_t dither_seed) const {
  const std::size_t n = original_.rows();
  const std::size_t d = original_.dims();
  AnonymizedTable result;
  result.method = method;
  result.k = k_;
  result.seed = dither_seed;
  result.alpha = params_.alpha;
  result.w = params_.w;
  result.response = original_.response();
  result.qi_hat.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (method == Method::kCentroid) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cluster =
          model_.clusters[static_cast<std::size_t>(model_.assignment[i])];
      for (std::size_t j = 0; j < d; ++j) {
        result.qi_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            standardizer_.Revert(j, cluster.centroid_x(static_cast<Eigen::Index>(j)));
      }
    }
    return result;
  }
  if (method == Method::kGaussian && !mixture_) {
    throw Error(ErrorCode::kDomain, "gaussian method needs alpha > 0");
  }
  const std::vector<CellIndex> cells = TransformIndices(method, dither_seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      result.qi_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          raw_joint_.values(j)[static_cast<std::size_t>(cells[i][j])];
    }
  }
  return result;
}

AnonymizedTable Anonymize(const DataTable& table, int k, Method method,
                          const AnonymizeParams& params) {
  if (method == Method::kGaussian && !(params.alpha > 0.0)) {
    throw Error(ErrorCode::kDomain, "gaussian method needs alpha > 0");
  }
  Anonymizer anonymizer(table, k, params);
  return anonymizer.Transform(method, params.seed);
}

std::vector<std::pair<std::vector<double>, std::int64_t>> ClusterValueCounts(
    const ClusterModel& model, std::size_t cluster) {
  const auto& values = model.clusters.at(cluster).values;
  std::map<std::vector<double>, std::int64_t> counts;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(values.cols()));
    for (Eigen::Index j = 0; j < values.cols(); ++j) row[j] = values(r, j);
    ++counts[row];
  }
  return {counts.begin(), counts.end()};
}

Eigen::MatrixXd ResampleWithinClusters(const ClusterModel& model,
                                       std::uint64_t seed,
                                       bool with_replacement) {
  const std::size_t n = model.records();
  const Eigen::Index d =
      model.clusters.empty() ? 0 : model.clusters.front().values.cols();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  for (std::size_t ell = 0; ell < model.num_clusters(); ++ell) {
    const Cluster& cluster = model.clusters[ell];
    if (with_replacement) {
      const auto counts = ClusterValueCounts(model, ell);
      for (std::size_t record : cluster.members) {
        Rng rng = Rng::Substream(seed, Stream::kResample, record);
        auto r = static_cast<std::int64_t>(rng.Below(cluster.size()));
        std::size_t pos = 0;
        while (r >= counts[pos].second) {
          r -= counts[pos].second;
          ++pos;
        }
        for (Eigen::Index j = 0; j < d; ++j) {
          out(static_cast<Eigen::Index>(record), j) = counts[pos].first[j];
        }
      }
    } else {
      Rng rng = Rng::Substream(seed, Stream::kPermute, ell);
      std::vector<Eigen::Index> order(cluster.size());
      for (std::size_t r = 0; r < order.size(); ++r) {
        order[r] = static_cast<Eigen::Index>(r);
      }
      Shuffle(order, rng);
      for (std::size_t r = 0; r < cluster.size(); ++r) {
        out.row(static_cast<Eigen::Index>(cluster.members[r])) =
            cluster.values.row(order[r]);
      }
    }
  }
  return out;
}

}  // namespace kdither
