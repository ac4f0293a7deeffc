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

#include "kdither/synthetic.h"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "kdither/error.h"
#include "kdither/rng.h"

namespace kdither {

DataTable GeneratePopulation(const PopulationConfig& config, std::size_t n,
                             double tilt, std::uint64_t seed) {
  const std::size_t d = config.levels.size();
  if (d == 0 || n == 0) throw Error(ErrorCode::kDomain, "empty population");
  if (!(config.dependence >= 0.0 && config.dependence < 1.0)) {
    throw Error(ErrorCode::kDomain, "dependence must be in [0, 1)");
  }
  for (int l : config.levels) {
    if (l < 1) throw Error(ErrorCode::kDomain, "level counts must be positive");
  }
  const boost::math::normal standard;
  std::vector<std::vector<double>> cuts(d);
  for (std::size_t j = 0; j < d; ++j) {
    const int levels = config.levels[j];
    for (int l = 1; l < levels; ++l) {
      const double p = std::pow(static_cast<double>(l) / levels, config.skew);
      cuts[j].push_back(boost::math::quantile(standard, p));
    }
  }
  const double top = static_cast<double>(config.levels[0] - 1);
  const double log_max = tilt > 0 ? tilt * top : 0.0;

  Rng rng = Rng::Substream(seed, Stream::kSynthetic, 0);
  Eigen::MatrixXd qi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  const double shared = std::sqrt(config.dependence);
  const double own = std::sqrt(1.0 - config.dependence);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n;) {
    const double g = rng.Normal();
    for (std::size_t j = 0; j < d; ++j) {
      const double z = shared * g + own * rng.Normal();
      x[j] = static_cast<double>(
          std::upper_bound(cuts[j].begin(), cuts[j].end(), z) - cuts[j].begin());
    }
    const double eps = rng.Normal();
    if (tilt != 0.0 && rng.Uniform() >= std::exp(tilt * x[0] - log_max)) continue;
    double signal = 10.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double span = std::max(1, config.levels[j] - 1);
      const double t = x[j] / span;
      const double scale = 2.0 / static_cast<double>(j + 1);
      signal += scale * (t + 1.5 * t * t);
    }
    const double sd = config.noise * (1.0 + x[0] / std::max(1.0, top));
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < d; ++j) qi(row, static_cast<Eigen::Index>(j)) = x[j];
    y(row) = signal + sd * eps;
    ++i;
  }
  std::vector<Column> columns;
  for (std::size_t j = 0; j < d; ++j) {
    columns.push_back({"q" + std::to_string(j + 1),
                       config.levels[j] <= 2 ? ColumnKind::kBinary
                                             : ColumnKind::kOrdinal});
  }
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return DataTable(std::move(qi), std::move(y), std::move(columns), std::move(ids));
}

}  // namespace kdither
