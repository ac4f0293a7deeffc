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

#ifndef KDITHER_SHIFTLEARN_H_
#define KDITHER_SHIFTLEARN_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kdither/dataset.h"

namespace kdither {

enum class ShiftEstimator { kNone, kNonparametric, kLogistic };

std::optional<ShiftEstimator> ParseShiftEstimator(std::string_view name);
std::string_view ShiftEstimatorName(ShiftEstimator estimator);

struct ShiftWeights {
  std::vector<double> values;
  ShiftEstimator estimator = ShiftEstimator::kNone;
  bool normalized = false;
  std::vector<std::string> warnings;
};

// q(v) / p(v) for each source support point, in source.counts() order.
// Points with q = 0 get weight 0. Target points missing from the source are
// reported in warnings. Normalization makes the record-weighted mean 1.
ShiftWeights NonparametricWeights(const EmpiricalJoint& source,
                                  const EmpiricalJoint& target,
                                  bool normalize = false);

// Per-record weights for source rows (each row must be in the source joint).
ShiftWeights NonparametricRecordWeights(const Eigen::MatrixXd& source_rows,
                                        const Eigen::MatrixXd& target_rows,
                                        bool normalize = false);

struct LogisticOptions {
  int max_iter = 100;
  double tol = 1e-8;
};

struct LogisticFit {
  Eigen::VectorXd coefficients;  // intercept first
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
};

// Logistic regression of labels (0/1) on [1, features] by iteratively
// reweighted least squares. Throws kConvergence on perfect separation.
LogisticFit FitLogistic(const Eigen::MatrixXd& features,
                        const std::vector<int>& labels,
                        const LogisticOptions& options = {});

// Weights for the label-0 (source) records of a pooled sample, in pooled
// order: P(target | x) / P(source | x) * n_source / n_target, then mean-one
// normalized over the source records.
ShiftWeights LogisticWeights(const Eigen::MatrixXd& pooled,
                             const std::vector<int>& labels,
                             const LogisticOptions& options = {});

// Pooled training records with task labels 0..m-1 and per-task target
// samples of the quasi-identifiers. Task priors are label frequencies.
struct TransferSpec {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<int> tasks;
  std::vector<Eigen::MatrixXd> targets;

  std::size_t num_tasks() const { return targets.size(); }
  std::vector<double> Priors() const;
};

// w(x, y | t) = p(x,y|t) / sum_t' p_t' p(x,y|t') * q(x|t) / p(x|t) over the
// pooled training records, with empirical plug-in estimates.
ShiftWeights TransferWeights(const TransferSpec& spec, int task,
                             bool normalize = false);

enum class Coding { kDummy, kNumeric };

std::optional<Coding> ParseCoding(std::string_view name);
std::string_view CodingName(Coding coding);

// Column mapping for a design matrix: declared levels per variable.
struct DesignSpec {
  Coding coding = Coding::kNumeric;
  std::vector<std::string> names;
  std::vector<std::vector<double>> levels;

  std::size_t width() const;
  std::vector<std::string> ColumnNames() const;
};

// Levels are the sorted distinct values of each column.
DesignSpec MakeDesignSpec(const Eigen::MatrixXd& qi, Coding coding,
                          std::vector<std::string> names = {});
DesignSpec MakeDesignSpec(const DataTable& table, Coding coding);

struct Design {
  Eigen::MatrixXd matrix;
  std::size_t unseen_levels = 0;
  std::vector<std::string> warnings;
};

// Numeric: intercept plus raw values. Dummy: intercept plus one indicator per
// level except the lowest; unseen levels encode as the reference level.
Design BuildDesign(const Eigen::MatrixXd& qi, const DesignSpec& spec);

struct RegressionModel {
  Coding coding = Coding::kNumeric;
  Eigen::VectorXd coefficients;
  DesignSpec spec;
  double ridge = 0.0;

  Eigen::VectorXd Predict(const Eigen::MatrixXd& design) const;
};

inline constexpr double kDefaultRidge = 1e-8;

// Minimizes sum_i w_i (x_i b - y_i)^2 + ridge * |b without intercept|^2 via
// column-pivoted QR of the sqrt(w)-scaled, ridge-augmented system. Weights
// are rescaled to mean one first, so the solution is invariant to a common
// weight factor. Column 0 of the design is the intercept.
RegressionModel WeightedLeastSquares(const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& y,
                                     const std::vector<double>& weights,
                                     double ridge = kDefaultRidge);
RegressionModel OrdinaryLeastSquares(const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& y,
                                     double ridge = kDefaultRidge);

// 100 * (mean(predicted) - mean(actual)) / mean(actual).
double RelativeBias(const Eigen::VectorXd& predicted,
                    const Eigen::VectorXd& actual);
double RSquared(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

using Pmf = std::map<std::vector<double>, double>;

// Empirical PMF of rows, optionally weighted (weights need not sum to 1).
Pmf RowPmf(const Eigen::MatrixXd& rows, const std::vector<double>& weights = {});

// Sum over the union of supports of min(p, q).
double HistogramIntersection(const Pmf& p, const Pmf& q);

// Maps each coordinate to the level whose midpoint cell (b_{i-1}, b_i]
// contains it. Observed levels map to themselves.
Eigen::MatrixXd SnapToLevels(const Eigen::MatrixXd& rows,
                             const std::vector<std::vector<double>>& levels);

}  // namespace kdither

#endif  // KDITHER_SHIFTLEARN_H_
