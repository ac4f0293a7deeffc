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

#ifndef KDITHER_REPORT_H_
#define KDITHER_REPORT_H_

#include <string>

#include "json.hpp"
#include "kdither/kmember.h"
#include "kdither/pipeline.h"
#include "kdither/reid.h"
#include "kdither/shiftlearn.h"

namespace kdither {

// Version of the JSON documents written by the tools.
inline constexpr const char* kSchemaVersion = "1.0";

nlohmann::json ToJson(const ReidReport& report);
nlohmann::json ToJson(const ShiftWeights& weights);
nlohmann::json ToJson(const RegressionModel& model);
nlohmann::json ToJson(const ValidationReport& report);
nlohmann::json SidecarJson(const AnonymizedTable& table, const ClusterModel& model);

// Serialized with a trailing newline; identical documents give identical bytes.
std::string DumpJson(const nlohmann::json& doc);

}  // namespace kdither

#endif  // KDITHER_REPORT_H_
