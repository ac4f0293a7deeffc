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

#include "kdither/experiment.h"

#include <optional>
#include <string>
#include <utility>

#include "kdither/error.h"
#include "kdither/reid.h"
#include "kdither/report.h"
#include "kdither/rng.h"

namespace kdither {
namespace {

std::vector<std::vector<double>> Levels(const DataTable& table) {
  const EmpiricalJoint joint = EmpiricalJoint::Build(table.qi());
  std::vector<std::vector<double>> levels;
  for (std::size_t j = 0; j < joint.dims(); ++j) levels.push_back(joint.values(j));
  return levels;
}

// Weights of the training rows toward the test distribution.
ShiftWeights EstimateShift(ShiftEstimator estimator,
                           const Eigen::MatrixXd& train_snapped,
                           const Eigen::MatrixXd& test) {
  switch (estimator) {
    case ShiftEstimator::kNone: {
      ShiftWeights out;
      out.values.assign(static_cast<std::size_t>(train_snapped.rows()), 1.0);
      out.normalized = true;
      return out;
    }
    case ShiftEstimator::kNonparametric:
      return NonparametricRecordWeights(train_snapped, test, true);
    case ShiftEstimator::kLogistic: {
      Eigen::MatrixXd pooled(train_snapped.rows() + test.rows(),
                             train_snapped.cols());
      pooled << train_snapped, test;
      std::vector<int> labels(static_cast<std::size_t>(pooled.rows()), 0);
      for (Eigen::Index i = train_snapped.rows(); i < pooled.rows(); ++i) {
        labels[static_cast<std::size_t>(i)] = 1;
      }
      return LogisticWeights(pooled, labels);
    }
  }
  throw Error(ErrorCode::kInternal, "unknown shift estimator");
}

// Fits on (train_qi, train_y) with the shift weights and scores on the test
// table. Dummy coding sees level-snapped inputs so centroids land in a cell.
nlohmann::json Fit(const ExperimentConfig& config,
                   const Eigen::MatrixXd& train_qi,
                   const Eigen::MatrixXd& train_snapped,
                   const Eigen::VectorXd& train_y, const DataTable& train,
                   const DataTable& test, const Pmf& test_pmf) {
  nlohmann::json fits = nlohmann::json::array();
  for (ShiftEstimator shift : config.shifts) {
    nlohmann::json base = {{"shift", std::string(ShiftEstimatorName(shift))}};
    ShiftWeights weights;
    try {
      weights = EstimateShift(shift, train_snapped, test.qi());
    } catch (const Error& e) {
      base["error"] = e.what();
      fits.push_back(std::move(base));
      continue;
    }
    base["weighted_similarity"] =
        HistogramIntersection(RowPmf(train_snapped, weights.values), test_pmf);
    base["warnings"] = weights.warnings;
    for (Coding coding : config.codings) {
      nlohmann::json entry = base;
      entry["coding"] = std::string(CodingName(coding));
      try {
        const DesignSpec spec = MakeDesignSpec(train, coding);
        const Eigen::MatrixXd& fit_qi =
            coding == Coding::kDummy ? train_snapped : train_qi;
        const Design design = BuildDesign(fit_qi, spec);
        const RegressionModel model =
            WeightedLeastSquares(design.matrix, train_y, weights.values);
        const Design test_design = BuildDesign(test.qi(), spec);
        const Eigen::VectorXd predicted = model.Predict(test_design.matrix);
        entry["relative_bias"] = RelativeBias(predicted, test.response());
        entry["r_squared"] = RSquared(predicted, test.response());
        entry["unseen_test_levels"] = test_design.unseen_levels;
      } catch (const Error& e) {
        entry["error"] = e.what();
      }
      fits.push_back(std::move(entry));
    }
  }
  return fits;
}

}  // namespace

nlohmann::json ConfigJson(const ExperimentConfig& config) {
  std::vector<std::string> methods, shifts, codings;
  for (Method m : config.methods) methods.emplace_back(MethodName(m));
  for (ShiftEstimator s : config.shifts) shifts.emplace_back(ShiftEstimatorName(s));
  for (Coding c : config.codings) codings.emplace_back(CodingName(c));
  return {{"population",
           {{"levels", config.population.levels},
            {"dependence", config.population.dependence},
            {"skew", config.population.skew},
            {"noise", config.population.noise}}},
          {"n_train", config.n_train},
          {"n_test", config.n_test},
          {"tilt", config.tilt},
          {"k_grid", config.k_grid},
          {"methods", methods},
          {"shifts", shifts},
          {"codings", codings},
          {"alpha", config.alpha},
          {"w", config.w},
          {"seed", config.seed},
          {"trials", config.trials}};
}

nlohmann::json RunExperiment(const ExperimentConfig& config) {
  if (config.k_grid.empty()) throw Error(ErrorCode::kDomain, "empty k grid");
  if (config.methods.empty()) throw Error(ErrorCode::kDomain, "no methods");

  const std::uint64_t pop_seed = MixSeed(config.seed, static_cast<std::uint64_t>(Stream::kSynthetic));
  const DataTable train =
      GeneratePopulation(config.population, config.n_train, 0.0, MixSeed(pop_seed, 0));
  const DataTable test = GeneratePopulation(config.population, config.n_test,
                                            config.tilt, MixSeed(pop_seed, 1));
  const auto levels = Levels(train);
  const Pmf test_pmf = RowPmf(test.qi());

  nlohmann::json doc = {{"spec_version", kSchemaVersion},
                        {"config", ConfigJson(config)}};

  {
    const Eigen::MatrixXd qi = train.qi();
    nlohmann::json baseline = {
        {"method", "original"},
        {"similarity", HistogramIntersection(RowPmf(qi), test_pmf)}};
    baseline["fits"] = Fit(config, qi, qi, train.response(), train, test, test_pmf);
    doc["baseline"] = std::move(baseline);
  }

  AnonymizeParams params;
  params.alpha = config.alpha;
  params.w = config.w;
  params.seed = config.seed;
  params.threads = config.threads;

  nlohmann::json results = nlohmann::json::array();
  for (int k : config.k_grid) {
    std::optional<Anonymizer> anonymizer;
    try {
      anonymizer.emplace(train, k, params);
    } catch (const Error& e) {
      results.push_back({{"k", k}, {"error", e.what()}});
      continue;
    }
    for (Method method : config.methods) {
      nlohmann::json entry = {{"k", k},
                              {"method", std::string(MethodName(method))}};
      try {
        const AnonymizedTable anon = anonymizer->Transform(
            method, MixSeed(config.seed, static_cast<std::uint64_t>(k)));
        const Eigen::MatrixXd snapped = SnapToLevels(anon.qi_hat, levels);
        entry["similarity"] =
            HistogramIntersection(RowPmf(snapped), test_pmf);
        if (config.trials > 0) {
          const ReidReport reid = ReidTrials(*anonymizer, method, config.trials,
                                             config.seed, config.threads);
          entry["reid_average"] = reid.average;
          entry["reid_nominal"] = reid.Nominal();
        }
        entry["fits"] = Fit(config, anon.qi_hat, snapped, anon.response, train,
                            test, test_pmf);
      } catch (const Error& e) {
        entry["error"] = e.what();
      }
      results.push_back(std::move(entry));
    }
  }
  doc["results"] = std::move(results);
  return doc;
}

}  // namespace kdither
