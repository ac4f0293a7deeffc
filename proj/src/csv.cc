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

#include "kdither/csv.h"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "kdither/error.h"

namespace kdither {
namespace {

std::vector<std::string> SplitLine(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

bool NeedsQuotes(const std::string& cell) {
  return cell.find_first_of(",\"") != std::string::npos;
}

void WriteCell(std::ostream& out, const std::string& cell) {
  if (!NeedsQuotes(cell)) {
    out << cell;
    return;
  }
  out << '"';
  for (char ch : cell) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

}  // namespace

std::optional<std::size_t> CsvDocument::ColumnIndex(
    std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvDocument ReadCsv(std::istream& in) {
  CsvDocument doc;
  std::string line;
  bool have_header = false;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      // Strip a UTF-8 byte order mark.
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      doc.header = SplitLine(line);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto cells = SplitLine(line);
    if (cells.size() != doc.header.size()) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_number) + ": expected " +
                      std::to_string(doc.header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    doc.rows.push_back(std::move(cells));
  }
  if (!have_header) throw Error(ErrorCode::kEmptyInput, "missing CSV header");
  return doc;
}

CsvDocument ReadCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return ReadCsv(in);
}

void WriteCsv(std::ostream& out, const CsvDocument& doc) {
  auto write_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      WriteCell(out, row[i]);
    }
    out << '\n';
  };
  write_row(doc.header);
  for (const auto& row : doc.rows) write_row(row);
}

void WriteCsvFile(const std::string& path, const CsvDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  WriteCsv(out, doc);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::string FormatDouble(double value) {
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error(ErrorCode::kInternal, "to_chars failed");
  return std::string(buf.data(), end);
}

}  // namespace kdither
