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

#include "kdither/error.h"

namespace kdither {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kEmptyCondition: return "empty_condition";
    case ErrorCode::kPartition: return "partition";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kConvergence: return "convergence";
    case ErrorCode::kInternal: return "internal";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace kdither
