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

#include "kdither/rosenblatt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kdither/error.h"

namespace kdither {
namespace {

// u numerically equal to 0 is moved to the smallest positive probability; u
// above 1 from rounding is pulled back to 1.
double ClampUnit(double u) {
  if (!(u > 0.0)) return std::numeric_limits<double>::min();
  if (u > 1.0) return 1.0;
  return u;
}

}  // namespace

double NormalCdf(double z, double mean, double variance) {
  const double t = (z - mean) / std::sqrt(variance);
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

double NormalLogPdf(double z, double mean, double variance) {
  const double t = z - mean;
  return -0.5 * (t * t / variance + std::log(2.0 * std::numbers::pi * variance));
}

UniformVector ForwardCellUniform(const DitherSample& sample,
                                 const CellPartition& partition,
                                 const EmpiricalJoint& joint) {
  const std::size_t d = partition.dims();
  if (sample.xt.size() != d || joint.dims() != d) {
    throw Error(ErrorCode::kShape, "sample, partition and joint widths differ");
  }
  UniformVector out;
  out.record_index = sample.record_index;
  out.u.resize(d);
  // Value indices of the cells visited so far. Merged partitions are 1-d,
  // so a prefix always consists of single-value intervals.
  std::vector<int> prefix;
  prefix.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double x = sample.xt[j];
    if (!std::isfinite(x)) throw Error(ErrorCode::kDomain, "non-finite dither");
    const Interval& iv =
        partition.intervals[j][static_cast<std::size_t>(partition.LocateInterval(j, x))];
    auto view = joint.Conditional(prefix);
    if (!view) {
      throw Error(ErrorCode::kPartition, "dither prefix lies in an empty cell");
    }
    // Cumulative count strictly before the interval and through it.
    const std::ptrdiff_t before = view->PositionAtOrBelow(iv.first - 1);
    const std::ptrdiff_t through = view->PositionAtOrBelow(iv.last);
    const std::int64_t cum_before =
        before < 0 ? 0 : view->CumulativeThrough(static_cast<std::size_t>(before));
    const std::int64_t cum_through =
        through < 0 ? 0 : view->CumulativeThrough(static_cast<std::size_t>(through));
    const double f_lo = CdfValue(cum_before, view->total);
    const double f_hi = CdfValue(cum_through, view->total);
    double frac = (x - iv.support_lo) / (iv.support_hi - iv.support_lo);
    frac = std::clamp(frac, 0.0, 1.0);
    double u = frac >= 1.0 ? f_hi : f_lo + (f_hi - f_lo) * frac;
    // Keep u in (f_lo, f_hi] so the inverse lands in this interval.
    if (cum_through > cum_before) {
      if (!(u > f_lo)) u = std::nextafter(f_lo, 2.0);
      if (u > f_hi) u = f_hi;
    }
    out.u[j] = ClampUnit(u);
    if (j + 1 < d) {
      if (iv.first != iv.last) {
        throw Error(ErrorCode::kPartition,
                    "merged cells are only valid in one dimension");
      }
      prefix.push_back(iv.first);
    }
  }
  return out;
}

ConditionalMoments ConditionGaussian(const GaussianMixture& mixture,
                                     std::size_t cluster, std::size_t j,
                                     std::span<const double> prefix) {
  if (cluster >= mixture.components.size() || j >= mixture.dims ||
      prefix.size() < j) {
    throw Error(ErrorCode::kDomain, "bad conditioning request");
  }
  const auto& comp = mixture.components[cluster];
  ConditionalMoments m;
  m.mean = comp.mean(static_cast<Eigen::Index>(j));
  if (j > 0) {
    const Eigen::VectorXd& beta = comp.coefficients[j];
    for (std::size_t t = 0; t < j; ++t) {
      m.mean += beta(static_cast<Eigen::Index>(t)) *
                (prefix[t] - comp.mean(static_cast<Eigen::Index>(t)));
    }
  }
  m.variance = comp.conditional_variance[j];
  if (!(m.variance > 0.0)) {
    throw Error(ErrorCode::kInternal, "non-positive conditional variance");
  }
  return m;
}

UniformVector ForwardGaussian(const DitherSample& sample,
                              const GaussianMixture& mixture) {
  const std::size_t d = mixture.dims;
  if (sample.xt.size() != d) {
    throw Error(ErrorCode::kShape, "sample width does not match mixture");
  }
  for (double x : sample.xt) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kDomain, "non-finite dither");
  }
  const std::size_t c = mixture.components.size();
  std::vector<double> log_post(c);
  for (std::size_t ell = 0; ell < c; ++ell) {
    log_post[ell] = std::log(mixture.components[ell].weight);
  }
  std::vector<double> means(c), variances(c);
  UniformVector out;
  out.record_index = sample.record_index;
  out.u.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double x = sample.xt[j];
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t ell = 0; ell < c; ++ell) {
      const auto m = ConditionGaussian(mixture, ell, j, sample.xt);
      means[ell] = m.mean;
      variances[ell] = m.variance;
      max_log = std::max(max_log, log_post[ell]);
    }
    double norm = 0.0;
    for (std::size_t ell = 0; ell < c; ++ell) {
      norm += std::exp(log_post[ell] - max_log);
    }
    double u = 0.0;
    for (std::size_t ell = 0; ell < c; ++ell) {
      const double post = std::exp(log_post[ell] - max_log) / norm;
      u += post * NormalCdf(x, means[ell], variances[ell]);
    }
    out.u[j] = ClampUnit(u);
    for (std::size_t ell = 0; ell < c; ++ell) {
      log_post[ell] += NormalLogPdf(x, means[ell], variances[ell]);
    }
  }
  return out;
}

CellIndex InverseEmpiricalIndex(const UniformVector& u,
                                const EmpiricalJoint& joint) {
  if (u.u.size() != joint.dims()) {
    throw Error(ErrorCode::kShape, "uniform vector width does not match joint");
  }
  CellIndex cell;
  cell.reserve(joint.dims());
  for (std::size_t j = 0; j < joint.dims(); ++j) {
    auto view = joint.Conditional(cell);
    if (!view) throw Error(ErrorCode::kEmptyCondition, "empty conditional");
    cell.push_back(InverseIndex(*view, u.u[j]));
  }
  return cell;
}

std::vector<double> InverseEmpirical(const UniformVector& u,
                                     const EmpiricalJoint& joint) {
  return joint.ValueOf(InverseEmpiricalIndex(u, joint));
}

}  // namespace kdither
