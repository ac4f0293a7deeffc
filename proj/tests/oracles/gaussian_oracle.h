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

#ifndef KDITHER_TESTS_ORACLES_GAUSSIAN_ORACLE_H_
#define KDITHER_TESTS_ORACLES_GAUSSIAN_ORACLE_H_

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kdither::oracle {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean and variance of coordinate j given coordinates 0..j-1 = prefix under
// N(mean, cov), by integrating the unnormalized joint density of the leading
// j+1 coordinates along x_j. Uses an LU inverse, not the library's solve.
inline Moments ConditionalByQuadrature(const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov, int j,
                                       const std::vector<double>& prefix) {
  const int m = j + 1;
  const Eigen::MatrixXd precision =
      cov.topLeftCorner(m, m).fullPivLu().inverse();
  auto log_density = [&](double t) {
    Eigen::VectorXd z(m);
    for (int i = 0; i < j; ++i) z(i) = prefix[static_cast<std::size_t>(i)] - mean(i);
    z(j) = t - mean(j);
    return -0.5 * z.dot(precision * z);
  };
  // Shift by the peak so the integrands stay O(1); the peak is found from the
  // quadratic in t directly.
  double lin = 0.0;
  for (int i = 0; i < j; ++i) {
    lin += precision(j, i) * (prefix[static_cast<std::size_t>(i)] - mean(i));
  }
  const double peak = mean(j) - lin / precision(j, j);
  const double log_peak = log_density(peak);
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  auto f0 = [&](double t) { return std::exp(log_density(t) - log_peak); };
  const double z0 = gauss_kronrod<double, 61>::integrate(f0, -inf, inf, 15, 1e-14);
  auto f1 = [&](double t) { return (t - peak) * f0(t); };
  const double z1 = gauss_kronrod<double, 61>::integrate(f1, -inf, inf, 15, 1e-14);
  const double mu = peak + z1 / z0;
  auto f2 = [&](double t) { return (t - mu) * (t - mu) * f0(t); };
  const double z2 = gauss_kronrod<double, 61>::integrate(f2, -inf, inf, 15, 1e-14);
  return {mu, z2 / z0};
}

}  // namespace kdither::oracle

#endif  // KDITHER_TESTS_ORACLES_GAUSSIAN_ORACLE_H_
