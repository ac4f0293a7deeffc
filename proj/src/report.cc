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

#include "kdither/report.h"

namespace kdither {

nlohmann::json ToJson(const ReidReport& report) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& cls : report.classes) {
    classes.push_back({{"tuple", cls.tuple},
                       {"size", cls.size},
                       {"correct", cls.correct},
                       {"frequency", cls.frequency}});
  }
  return {{"spec_version", kSchemaVersion},
          {"method", std::string(MethodName(report.method))},
          {"k", report.k},
          {"trials", report.trials},
          {"records", report.records},
          {"total_correct", report.total_correct},
          {"average", report.average},
          {"nominal", report.Nominal()},
          {"band_3sigma", report.Band()},
          {"classes", std::move(classes)}};
}

nlohmann::json ToJson(const ShiftWeights& weights) {
  return {{"estimator", std::string(ShiftEstimatorName(weights.estimator))},
          {"normalized", weights.normalized},
          {"warnings", weights.warnings},
          {"weights", weights.values}};
}

nlohmann::json ToJson(const RegressionModel& model) {
  const auto names = model.spec.ColumnNames();
  std::vector<double> values(model.coefficients.data(),
                             model.coefficients.data() + model.coefficients.size());
  return {{"coding", std::string(CodingName(model.coding))},
          {"columns", names},
          {"coefficients", values},
          {"ridge", model.ridge}};
}

nlohmann::json ToJson(const ValidationReport& report) {
  return {{"ok", report.ok}, {"violations", report.violations}};
}

nlohmann::json SidecarJson(const AnonymizedTable& table,
                           const ClusterModel& model) {
  std::vector<std::size_t> sizes;
  for (const auto& c : model.clusters) sizes.push_back(c.size());
  return {{"spec_version", kSchemaVersion},
          {"method", std::string(MethodName(table.method))},
          {"k", table.k},
          {"seed", table.seed},
          {"alpha", table.alpha},
          {"w", table.w},
          {"records", table.qi_hat.rows()},
          {"clusters", model.num_clusters()},
          {"min_cluster_size",
           sizes.empty() ? 0 : *std::min_element(sizes.begin(), sizes.end())}};
}

std::string DumpJson(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

}  // namespace kdither
