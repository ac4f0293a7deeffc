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

#include "kdither/shiftlearn.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kdither/error.h"

namespace kdither {
namespace {

std::vector<double> RowOf(const Eigen::MatrixXd& m, Eigen::Index i) {
  std::vector<double> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
  return row;
}

std::map<std::vector<double>, std::int64_t> RowCounts(const Eigen::MatrixXd& m) {
  std::map<std::vector<double>, std::int64_t> counts;
  for (Eigen::Index i = 0; i < m.rows(); ++i) ++counts[RowOf(m, i)];
  return counts;
}

void NormalizeMeanOne(std::vector<double>& w) {
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "weights sum to zero");
  }
  const double mean = sum / static_cast<double>(w.size());
  for (double& x : w) x /= mean;
}

double Mean(const Eigen::VectorXd& v) {
  return v.sum() / static_cast<double>(v.size());
}

}  // namespace

std::optional<ShiftEstimator> ParseShiftEstimator(std::string_view name) {
  if (name == "none") return ShiftEstimator::kNone;
  if (name == "nonparametric") return ShiftEstimator::kNonparametric;
  if (name == "logistic") return ShiftEstimator::kLogistic;
  return std::nullopt;
}

std::string_view ShiftEstimatorName(ShiftEstimator estimator) {
  switch (estimator) {
    case ShiftEstimator::kNone: return "none";
    case ShiftEstimator::kNonparametric: return "nonparametric";
    case ShiftEstimator::kLogistic: return "logistic";
  }
  return "none";
}

ShiftWeights NonparametricWeights(const EmpiricalJoint& source,
                                  const EmpiricalJoint& target,
                                  bool normalize) {
  if (source.dims() != target.dims()) {
    throw Error(ErrorCode::kShape, "source and target differ in dimension");
  }
  std::map<std::vector<double>, std::int64_t> target_counts;
  for (const auto& [cell, count] : target.counts()) {
    target_counts[target.ValueOf(cell)] = count;
  }
  ShiftWeights out;
  out.estimator = ShiftEstimator::kNonparametric;
  std::size_t matched = 0;
  for (const auto& [cell, count] : source.counts()) {
    auto it = target_counts.find(source.ValueOf(cell));
    if (it == target_counts.end()) {
      out.values.push_back(0.0);
      continue;
    }
    ++matched;
    // (q_count / q_total) / (p_count / p_total), arranged to keep integers
    // exact as long as possible.
    const double num = static_cast<double>(it->second) *
                       static_cast<double>(source.total());
    const double den = static_cast<double>(count) *
                       static_cast<double>(target.total());
    out.values.push_back(num / den);
  }
  if (matched < target_counts.size()) {
    out.warnings.push_back(std::to_string(target_counts.size() - matched) +
                           " target support points have no source records "
                           "and cannot be reached by reweighting");
  }
  if (normalize) {
    double weighted = 0.0;
    for (std::size_t s = 0; s < out.values.size(); ++s) {
      weighted += out.values[s] * static_cast<double>(source.counts()[s].second);
    }
    if (!(weighted > 0.0)) {
      throw Error(ErrorCode::kDegenerate, "source and target supports are disjoint");
    }
    const double mean = weighted / static_cast<double>(source.total());
    for (double& w : out.values) w /= mean;
    out.normalized = true;
  }
  return out;
}

ShiftWeights NonparametricRecordWeights(const Eigen::MatrixXd& source_rows,
                                        const Eigen::MatrixXd& target_rows,
                                        bool normalize) {
  const EmpiricalJoint source = EmpiricalJoint::Build(source_rows);
  const EmpiricalJoint target = EmpiricalJoint::Build(target_rows);
  ShiftWeights support = NonparametricWeights(source, target, normalize);
  ShiftWeights out;
  out.estimator = support.estimator;
  out.normalized = support.normalized;
  out.warnings = support.warnings;
  out.values.resize(static_cast<std::size_t>(source_rows.rows()));
  const auto& counts = source.counts();
  for (Eigen::Index i = 0; i < source_rows.rows(); ++i) {
    const CellIndex cell = *source.Locate(RowOf(source_rows, i));
    auto it = std::lower_bound(
        counts.begin(), counts.end(), cell,
        [](const auto& entry, const CellIndex& key) { return entry.first < key; });
    out.values[static_cast<std::size_t>(i)] =
        support.values[static_cast<std::size_t>(it - counts.begin())];
  }
  return out;
}

LogisticFit FitLogistic(const Eigen::MatrixXd& features,
                        const std::vector<int>& labels,
                        const LogisticOptions& options) {
  const Eigen::Index n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size() || n == 0) {
    throw Error(ErrorCode::kShape, "features and labels differ in length");
  }
  bool has0 = false, has1 = false;
  for (int l : labels) {
    if (l == 0) has0 = true;
    else if (l == 1) has1 = true;
    else throw Error(ErrorCode::kDomain, "labels must be 0 or 1");
  }
  if (!has0 || !has1) {
    throw Error(ErrorCode::kDomain, "both population labels must be present");
  }
  const Eigen::Index p = features.cols() + 1;
  Eigen::MatrixXd x(n, p);
  x.col(0).setOnes();
  x.rightCols(features.cols()) = features;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];

  auto log_likelihood = [&](const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // log(1 + e^eta) without overflow.
      const double e = eta(i);
      const double softplus = e > 0 ? e + std::log1p(std::exp(-e))
                                     : std::log1p(std::exp(e));
      ll += y(i) * e - softplus;
    }
    return ll;
  };

  LogisticFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  double ll = log_likelihood(eta);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    Eigen::VectorXd sw(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double prob = 1.0 / (1.0 + std::exp(-eta(i)));
      const double w = std::max(prob * (1.0 - prob), 1e-12);
      sw(i) = std::sqrt(w);
      z(i) = eta(i) + (y(i) - prob) / w;
    }
    const Eigen::MatrixXd a = sw.asDiagonal() * x;
    const Eigen::VectorXd b = sw.cwiseProduct(z);
    Eigen::VectorXd beta = a.colPivHouseholderQr().solve(b);
    if (!beta.allFinite()) {
      throw Error(ErrorCode::kConvergence, "IRLS produced non-finite coefficients");
    }
    eta = x * beta;
    const double next = log_likelihood(eta);
    fit.coefficients = beta;
    fit.iterations = iter;
    fit.log_likelihood = next;
    // Log-likelihood reaching 0 means the labels are perfectly separated.
    if (next > -1e-6 || beta.cwiseAbs().maxCoeff() > 1e6) {
      throw Error(ErrorCode::kConvergence,
                  "perfect separation: log-likelihood " + std::to_string(next) +
                      " after " + std::to_string(iter) + " iterations");
    }
    if (std::abs(next - ll) < options.tol) {
      fit.converged = true;
      break;
    }
    ll = next;
  }
  return fit;
}

ShiftWeights LogisticWeights(const Eigen::MatrixXd& pooled,
                             const std::vector<int>& labels,
                             const LogisticOptions& options) {
  const LogisticFit fit = FitLogistic(pooled, labels, options);
  ShiftWeights out;
  out.estimator = ShiftEstimator::kLogistic;
  if (!fit.converged) {
    out.warnings.push_back("IRLS did not converge in " +
                           std::to_string(options.max_iter) +
                           " iterations; using the last iterate");
  }
  const auto n_target = static_cast<double>(
      std::count(labels.begin(), labels.end(), 1));
  const double n_source = static_cast<double>(labels.size()) - n_target;
  for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] != 0) continue;
    const double eta = fit.coefficients(0) +
                       pooled.row(i).dot(fit.coefficients.tail(pooled.cols()));
    out.values.push_back(std::exp(eta) * n_source / n_target);
  }
  NormalizeMeanOne(out.values);
  out.normalized = true;
  return out;
}

std::vector<double> TransferSpec::Priors() const {
  std::vector<double> priors(num_tasks(), 0.0);
  for (int t : tasks) priors.at(static_cast<std::size_t>(t)) += 1.0;
  for (double& p : priors) p /= static_cast<double>(tasks.size());
  return priors;
}

ShiftWeights TransferWeights(const TransferSpec& spec, int task,
                             bool normalize) {
  const auto n = static_cast<std::size_t>(spec.x.rows());
  if (spec.tasks.size() != n || static_cast<std::size_t>(spec.y.size()) != n) {
    throw Error(ErrorCode::kShape, "transfer spec parts differ in length");
  }
  if (task < 0 || static_cast<std::size_t>(task) >= spec.num_tasks()) {
    throw Error(ErrorCode::kDomain, "task " + std::to_string(task) + " absent");
  }
  for (int t : spec.tasks) {
    if (t < 0 || static_cast<std::size_t>(t) >= spec.num_tasks()) {
      throw Error(ErrorCode::kDomain, "record task label out of range");
    }
  }
  const auto t = static_cast<std::size_t>(task);
  const double n_task = static_cast<double>(
      std::count(spec.tasks.begin(), spec.tasks.end(), task));
  if (n_task == 0) {
    throw Error(ErrorCode::kDomain, "task " + std::to_string(task) + " has no records");
  }
  // Joint (x, y) rows and x rows.
  std::map<std::vector<double>, std::int64_t> xy_all, xy_task, x_task;
  std::vector<std::vector<double>> xy_rows(n), x_rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_rows[i] = RowOf(spec.x, static_cast<Eigen::Index>(i));
    xy_rows[i] = x_rows[i];
    xy_rows[i].push_back(spec.y(static_cast<Eigen::Index>(i)));
    ++xy_all[xy_rows[i]];
    if (spec.tasks[i] == task) {
      ++xy_task[xy_rows[i]];
      ++x_task[x_rows[i]];
    }
  }
  const auto target_counts = RowCounts(spec.targets[t]);
  const double n_target = static_cast<double>(spec.targets[t].rows());
  const double n_all = static_cast<double>(n);

  ShiftWeights out;
  out.estimator = ShiftEstimator::kNonparametric;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it_task = xy_task.find(xy_rows[i]);
    if (it_task == xy_task.end()) {
      out.values[i] = 0.0;
      continue;
    }
    const double p_task = static_cast<double>(it_task->second) / n_task;
    const double p_mix = static_cast<double>(xy_all.at(xy_rows[i])) / n_all;
    auto it_q = target_counts.find(x_rows[i]);
    const double q = it_q == target_counts.end()
                         ? 0.0
                         : static_cast<double>(it_q->second) / n_target;
    const double p_x = static_cast<double>(x_task.at(x_rows[i])) / n_task;
    out.values[i] = (p_task / p_mix) * (q / p_x);
  }
  if (normalize) {
    NormalizeMeanOne(out.values);
    out.normalized = true;
  }
  return out;
}

std::optional<Coding> ParseCoding(std::string_view name) {
  if (name == "dummy") return Coding::kDummy;
  if (name == "numeric") return Coding::kNumeric;
  return std::nullopt;
}

std::string_view CodingName(Coding coding) {
  return coding == Coding::kDummy ? "dummy" : "numeric";
}

std::size_t DesignSpec::width() const {
  std::size_t w = 1;
  for (const auto& lv : levels) {
    w += coding == Coding::kDummy ? (lv.empty() ? 0 : lv.size() - 1) : 1;
  }
  return w;
}

std::vector<std::string> DesignSpec::ColumnNames() const {
  std::vector<std::string> out{"(intercept)"};
  for (std::size_t v = 0; v < levels.size(); ++v) {
    const std::string name = v < names.size() ? names[v] : "x" + std::to_string(v + 1);
    if (coding == Coding::kNumeric) {
      out.push_back(name);
    } else {
      for (std::size_t l = 1; l < levels[v].size(); ++l) {
        out.push_back(name + "=" + std::to_string(levels[v][l]));
      }
    }
  }
  return out;
}

DesignSpec MakeDesignSpec(const Eigen::MatrixXd& qi, Coding coding,
                          std::vector<std::string> names) {
  DesignSpec spec;
  spec.coding = coding;
  spec.names = std::move(names);
  for (Eigen::Index j = 0; j < qi.cols(); ++j) {
    std::vector<double> lv(qi.col(j).data(), qi.col(j).data() + qi.rows());
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    spec.levels.push_back(std::move(lv));
  }
  return spec;
}

DesignSpec MakeDesignSpec(const DataTable& table, Coding coding) {
  std::vector<std::string> names;
  for (const auto& col : table.columns()) names.push_back(col.name);
  return MakeDesignSpec(table.qi(), coding, std::move(names));
}

Design BuildDesign(const Eigen::MatrixXd& qi, const DesignSpec& spec) {
  if (static_cast<std::size_t>(qi.cols()) != spec.levels.size()) {
    throw Error(ErrorCode::kShape, "design spec does not match column count");
  }
  Design design;
  const Eigen::Index n = qi.rows();
  design.matrix = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(spec.width()));
  design.matrix.col(0).setOnes();
  Eigen::Index col = 1;
  for (std::size_t v = 0; v < spec.levels.size(); ++v) {
    const auto jv = static_cast<Eigen::Index>(v);
    if (spec.coding == Coding::kNumeric) {
      design.matrix.col(col) = qi.col(jv);
      ++col;
      continue;
    }
    const auto& lv = spec.levels[v];
    std::size_t unseen = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto it = std::lower_bound(lv.begin(), lv.end(), qi(i, jv));
      if (it == lv.end() || *it != qi(i, jv)) {
        ++unseen;
        continue;
      }
      const auto level = static_cast<Eigen::Index>(it - lv.begin());
      if (level > 0) design.matrix(i, col + level - 1) = 1.0;
    }
    if (unseen > 0) {
      design.unseen_levels += unseen;
      design.warnings.push_back(
          std::to_string(unseen) + " values of " +
          (v < spec.names.size() ? spec.names[v] : "x" + std::to_string(v + 1)) +
          " are not declared levels; encoded as the reference level");
    }
    col += lv.empty() ? 0 : static_cast<Eigen::Index>(lv.size()) - 1;
  }
  return design;
}

Eigen::VectorXd RegressionModel::Predict(const Eigen::MatrixXd& design) const {
  if (design.cols() != coefficients.size()) {
    throw Error(ErrorCode::kShape, "design width does not match coefficients");
  }
  return design * coefficients;
}

namespace {

RegressionModel SolveScaled(const Eigen::MatrixXd& scaled_design,
                            const Eigen::VectorXd& scaled_y, double ridge) {
  const Eigen::Index n = scaled_design.rows();
  const Eigen::Index p = scaled_design.cols();
  Eigen::VectorXd beta;
  if (ridge > 0.0 && p > 1) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + p - 1, p);
    a.topRows(n) = scaled_design;
    const double r = std::sqrt(ridge);
    for (Eigen::Index j = 1; j < p; ++j) a(n + j - 1, j) = r;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + p - 1);
    b.head(n) = scaled_y;
    beta = a.colPivHouseholderQr().solve(b);
  } else {
    beta = scaled_design.colPivHouseholderQr().solve(scaled_y);
  }
  RegressionModel model;
  model.coefficients = std::move(beta);
  model.ridge = ridge;
  return model;
}

}  // namespace

RegressionModel WeightedLeastSquares(const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& y,
                                     const std::vector<double>& weights,
                                     double ridge) {
  const Eigen::Index n = design.rows();
  if (y.size() != n || static_cast<Eigen::Index>(weights.size()) != n) {
    throw Error(ErrorCode::kShape, "design, response and weights differ in length");
  }
  if (ridge < 0.0) throw Error(ErrorCode::kDomain, "ridge must be >= 0");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kDomain, "weights must be finite and nonnegative");
    }
  }
  std::vector<double> w = weights;
  NormalizeMeanOne(w);
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(w[static_cast<std::size_t>(i)]);
  return SolveScaled(sw.asDiagonal() * design, sw.cwiseProduct(y), ridge);
}

RegressionModel OrdinaryLeastSquares(const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& y, double ridge) {
  if (y.size() != design.rows()) {
    throw Error(ErrorCode::kShape, "design and response differ in length");
  }
  return SolveScaled(design, y, ridge);
}

double RelativeBias(const Eigen::VectorXd& predicted,
                    const Eigen::VectorXd& actual) {
  if (predicted.size() != actual.size() || actual.size() == 0) {
    throw Error(ErrorCode::kShape, "predicted and actual differ in length");
  }
  const double mean_actual = Mean(actual);
  if (mean_actual == 0.0) {
    throw Error(ErrorCode::kDomain, "relative bias undefined for zero actual mean");
  }
  return 100.0 * (Mean(predicted) - mean_actual) / mean_actual;
}

double RSquared(const Eigen::VectorXd& predicted,
                const Eigen::VectorXd& actual) {
  if (predicted.size() != actual.size() || actual.size() == 0) {
    throw Error(ErrorCode::kShape, "predicted and actual differ in length");
  }
  const double mean_actual = Mean(actual);
  const double sst = (actual.array() - mean_actual).square().sum();
  if (!(sst > 0.0)) {
    throw Error(ErrorCode::kDomain, "R^2 undefined for zero-variance actual values");
  }
  const double sse = (actual - predicted).squaredNorm();
  return 1.0 - sse / sst;
}

Pmf RowPmf(const Eigen::MatrixXd& rows, const std::vector<double>& weights) {
  if (!weights.empty() &&
      static_cast<Eigen::Index>(weights.size()) != rows.rows()) {
    throw Error(ErrorCode::kShape, "weights do not match rows");
  }
  Pmf pmf;
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    pmf[RowOf(rows, i)] += w;
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerate, "PMF has no mass");
  for (auto& [row, mass] : pmf) mass /= total;
  return pmf;
}

double HistogramIntersection(const Pmf& p, const Pmf& q) {
  double sum = 0.0;
  auto ip = p.begin();
  auto iq = q.begin();
  // Merge walk over the sorted supports; absent mass counts as 0.
  while (ip != p.end() && iq != q.end()) {
    if (ip->first < iq->first) {
      ++ip;
    } else if (iq->first < ip->first) {
      ++iq;
    } else {
      sum += std::min(ip->second, iq->second);
      ++ip;
      ++iq;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

Eigen::MatrixXd SnapToLevels(const Eigen::MatrixXd& rows,
                             const std::vector<std::vector<double>>& levels) {
  if (static_cast<std::size_t>(rows.cols()) != levels.size()) {
    throw Error(ErrorCode::kShape, "levels do not match column count");
  }
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const auto& lv = levels[static_cast<std::size_t>(j)];
    if (lv.empty()) throw Error(ErrorCode::kDomain, "empty level set");
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double x = rows(i, j);
      std::size_t l = 0;
      while (l + 1 < lv.size() && x > 0.5 * (lv[l] + lv[l + 1])) ++l;
      out(i, j) = lv[l];
    }
  }
  return out;
}

}  // namespace kdither
