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

#ifndef KDITHER_CSV_H_
#define KDITHER_CSV_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kdither {

// Header plus rows of raw cells. Comma separated, optional double quotes
// around a cell, no embedded newlines.
struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> ColumnIndex(std::string_view name) const;
};

CsvDocument ReadCsv(std::istream& in);
CsvDocument ReadCsvFile(const std::string& path);
void WriteCsv(std::ostream& out, const CsvDocument& doc);
void WriteCsvFile(const std::string& path, const CsvDocument& doc);

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace kdither

#endif  // KDITHER_CSV_H_
