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

#include "kdither/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "kdither/error.h"

namespace kdither {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> ParseDouble(std::string_view text) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::size_t RequireColumn(const CsvDocument& doc, const std::string& name) {
  auto index = doc.ColumnIndex(name);
  if (!index) {
    throw Error(ErrorCode::kSchema, "column \"" + name + "\" not in header");
  }
  return *index;
}

}  // namespace

std::string_view ColumnKindName(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kOrdinal: return "ordinal";
    case ColumnKind::kBinary: return "binary";
    case ColumnKind::kContinuous: return "continuous";
  }
  return "ordinal";
}

DataTable::DataTable(Eigen::MatrixXd qi, Eigen::VectorXd response,
                     std::vector<Column> columns,
                     std::vector<std::string> record_ids)
    : qi_(std::move(qi)),
      response_(std::move(response)),
      columns_(std::move(columns)),
      record_ids_(std::move(record_ids)) {
  if (qi_.rows() < 1) throw Error(ErrorCode::kEmptyInput, "table has no rows");
  if (qi_.cols() < 1) {
    throw Error(ErrorCode::kShape, "table has no quasi-identifier columns");
  }
  if (response_.size() != qi_.rows() ||
      record_ids_.size() != static_cast<std::size_t>(qi_.rows())) {
    throw Error(ErrorCode::kShape, "row counts of table parts disagree");
  }
  if (columns_.size() != static_cast<std::size_t>(qi_.cols())) {
    throw Error(ErrorCode::kShape, "column metadata does not match width");
  }
  std::set<std::string_view> seen;
  for (const auto& id : record_ids_) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kSchema, "duplicate record id \"" + id + "\"");
    }
  }
}

DataTable::DataTable(Eigen::MatrixXd qi, Eigen::VectorXd response)
    : DataTable(
          qi, std::move(response),
          [&qi] {
            std::vector<Column> cols;
            for (Eigen::Index j = 0; j < qi.cols(); ++j) {
              cols.push_back({"x" + std::to_string(j + 1),
                              ColumnKind::kOrdinal});
            }
            return cols;
          }(),
          [&qi] {
            std::vector<std::string> ids;
            for (Eigen::Index i = 0; i < qi.rows(); ++i) {
              ids.push_back(std::to_string(i));
            }
            return ids;
          }()) {}

std::vector<double> DataTable::Row(std::size_t i) const {
  std::vector<double> row(dims());
  for (std::size_t j = 0; j < dims(); ++j) row[j] = qi_(i, j);
  return row;
}

DataTable DataTable::WithValues(Eigen::MatrixXd qi,
                                Eigen::VectorXd response) const {
  return DataTable(std::move(qi), std::move(response), columns_, record_ids_);
}

double RoundSignificant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*e", digits - 1, value);
  return std::strtod(buf, nullptr);
}

DataTable TableFromCsv(const CsvDocument& doc, const Schema& schema) {
  if (schema.qi.empty()) {
    throw Error(ErrorCode::kSchema, "schema names no quasi-identifiers");
  }
  if (schema.response.empty()) {
    throw Error(ErrorCode::kSchema, "schema names no response column");
  }
  std::vector<std::size_t> qi_cols;
  for (const auto& name : schema.qi) qi_cols.push_back(RequireColumn(doc, name));
  const std::size_t response_col = RequireColumn(doc, schema.response);
  std::optional<std::size_t> id_col;
  if (schema.id) id_col = RequireColumn(doc, *schema.id);
  for (const auto& name : schema.continuous) {
    if (std::find(schema.qi.begin(), schema.qi.end(), name) ==
        schema.qi.end()) {
      throw Error(ErrorCode::kSchema,
                  "continuous column \"" + name + "\" is not a quasi-identifier");
    }
  }
  if (doc.rows.empty()) throw Error(ErrorCode::kEmptyInput, "no data rows");

  const auto n = static_cast<Eigen::Index>(doc.rows.size());
  const auto d = static_cast<Eigen::Index>(qi_cols.size());
  Eigen::MatrixXd qi(n, d);
  Eigen::VectorXd response(n);
  std::vector<std::string> ids;
  ids.reserve(doc.rows.size());

  auto parse = [&doc](std::size_t row, std::size_t col) {
    auto value = ParseDouble(doc.rows[row][col]);
    if (!value) {
      // Row numbers count the header as line 1.
      throw Error(ErrorCode::kParse,
                  "row " + std::to_string(row + 2) + ", column \"" +
                      doc.header[col] + "\": not a number: \"" +
                      doc.rows[row][col] + "\"");
    }
    return *value;
  };

  std::vector<bool> continuous(qi_cols.size(), false);
  for (std::size_t j = 0; j < qi_cols.size(); ++j) {
    continuous[j] = std::find(schema.continuous.begin(),
                              schema.continuous.end(),
                              schema.qi[j]) != schema.continuous.end();
  }
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    for (std::size_t j = 0; j < qi_cols.size(); ++j) {
      double v = parse(i, qi_cols[j]);
      if (continuous[j]) v = RoundSignificant(v, 12);
      qi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
    response(static_cast<Eigen::Index>(i)) = parse(i, response_col);
    ids.push_back(id_col ? doc.rows[i][*id_col] : std::to_string(i));
  }

  std::vector<Column> columns;
  for (std::size_t j = 0; j < qi_cols.size(); ++j) {
    ColumnKind kind = ColumnKind::kOrdinal;
    if (continuous[j]) {
      kind = ColumnKind::kContinuous;
    } else {
      std::set<double> levels;
      for (Eigen::Index i = 0; i < n && levels.size() <= 2; ++i) {
        levels.insert(qi(i, static_cast<Eigen::Index>(j)));
      }
      if (levels.size() <= 2) kind = ColumnKind::kBinary;
    }
    columns.push_back({schema.qi[j], kind});
  }
  return DataTable(std::move(qi), std::move(response), std::move(columns),
                   std::move(ids));
}

DataTable LoadTable(const std::string& path, const Schema& schema) {
  return TableFromCsv(ReadCsvFile(path), schema);
}

// ---------------------------------------------------------------------------
// Standardizer

double Standardizer::Apply(std::size_t j, double x) const {
  return (x - means[j]) / scales[j];
}
double Standardizer::Revert(std::size_t j, double z) const {
  return z * scales[j] + means[j];
}
double Standardizer::ApplyResponse(double y) const {
  return (y - response_mean) / response_scale;
}
double Standardizer::RevertResponse(double z) const {
  return z * response_scale + response_mean;
}

Eigen::MatrixXd Standardizer::ApplyQi(const Eigen::MatrixXd& qi) const {
  Eigen::MatrixXd out(qi.rows(), qi.cols());
  for (Eigen::Index j = 0; j < qi.cols(); ++j) {
    for (Eigen::Index i = 0; i < qi.rows(); ++i) {
      out(i, j) = Apply(static_cast<std::size_t>(j), qi(i, j));
    }
  }
  return out;
}

Eigen::MatrixXd Standardizer::RevertQi(const Eigen::MatrixXd& qi) const {
  Eigen::MatrixXd out(qi.rows(), qi.cols());
  for (Eigen::Index j = 0; j < qi.cols(); ++j) {
    for (Eigen::Index i = 0; i < qi.rows(); ++i) {
      out(i, j) = Revert(static_cast<std::size_t>(j), qi(i, j));
    }
  }
  return out;
}

DataTable Standardizer::Apply(const DataTable& table) const {
  Eigen::VectorXd y(table.response().size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) = ApplyResponse(table.response()(i));
  }
  return table.WithValues(ApplyQi(table.qi()), std::move(y));
}

DataTable Standardizer::Revert(const DataTable& table) const {
  Eigen::VectorXd y(table.response().size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) = RevertResponse(table.response()(i));
  }
  return table.WithValues(RevertQi(table.qi()), std::move(y));
}

namespace {

// Returns (mean, scale, constant).
std::tuple<double, double, bool> ColumnMoments(const double* data,
                                               Eigen::Index n) {
  bool constant = true;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (data[i] != data[0]) {
      constant = false;
      break;
    }
  }
  if (constant) return {0.0, 1.0, true};
  double mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) mean += data[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = data[i] - mean;
    ss += t * t;
  }
  const double scale = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(scale > 0.0)) return {0.0, 1.0, true};
  return {mean, scale, false};
}

}  // namespace

std::pair<DataTable, Standardizer> Standardize(const DataTable& table) {
  Standardizer s;
  const Eigen::Index n = table.qi().rows();
  for (Eigen::Index j = 0; j < table.qi().cols(); ++j) {
    auto [mean, scale, constant] = ColumnMoments(table.qi().col(j).data(), n);
    s.means.push_back(mean);
    s.scales.push_back(scale);
    s.constant_flags.push_back(constant);
  }
  auto [mean, scale, constant] = ColumnMoments(table.response().data(), n);
  s.response_mean = mean;
  s.response_scale = scale;
  s.response_constant = constant;
  DataTable standardized = s.Apply(table);
  return {std::move(standardized), std::move(s)};
}

// ---------------------------------------------------------------------------
// EmpiricalJoint

std::ptrdiff_t ConditionalView::PositionAtOrBelow(int value_index) const {
  auto it = std::upper_bound(support.begin(), support.end(), value_index);
  return static_cast<std::ptrdiff_t>(it - support.begin()) - 1;
}

std::ptrdiff_t ConditionalView::PositionOf(int value_index) const {
  auto it = std::lower_bound(support.begin(), support.end(), value_index);
  if (it == support.end() || *it != value_index) return -1;
  return it - support.begin();
}

EmpiricalJoint EmpiricalJoint::Build(const Eigen::MatrixXd& qi) {
  if (qi.rows() < 1 || qi.cols() < 1) {
    throw Error(ErrorCode::kEmptyInput, "empirical joint of an empty matrix");
  }
  EmpiricalJoint joint;
  const auto n = static_cast<std::size_t>(qi.rows());
  const auto d = static_cast<std::size_t>(qi.cols());
  joint.values_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& vals = joint.values_[j];
    vals.assign(qi.col(static_cast<Eigen::Index>(j)).data(),
                qi.col(static_cast<Eigen::Index>(j)).data() + n);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  }
  std::vector<CellIndex> tuples(n, CellIndex(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto& vals = joint.values_[j];
      const double x = qi(static_cast<Eigen::Index>(i),
                          static_cast<Eigen::Index>(j));
      tuples[i][j] = static_cast<int>(
          std::lower_bound(vals.begin(), vals.end(), x) - vals.begin());
    }
  }
  std::sort(tuples.begin(), tuples.end());
  for (std::size_t i = 0; i < n;) {
    std::size_t e = i;
    while (e < n && tuples[e] == tuples[i]) ++e;
    joint.counts_.emplace_back(tuples[i], static_cast<std::int64_t>(e - i));
    i = e;
  }
  joint.total_ = static_cast<std::int64_t>(n);
  joint.BuildNode(0, joint.counts_.size(), 0);
  return joint;
}

int EmpiricalJoint::BuildNode(std::size_t lo, std::size_t hi,
                              std::size_t depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  std::vector<int> support;
  std::vector<std::int64_t> cumulative;
  std::vector<int> children;
  std::int64_t running = 0;
  for (std::size_t i = lo; i < hi;) {
    const int v = counts_[i].first[depth];
    std::size_t e = i;
    std::int64_t mass = 0;
    while (e < hi && counts_[e].first[depth] == v) {
      mass += counts_[e].second;
      ++e;
    }
    running += mass;
    support.push_back(v);
    cumulative.push_back(running);
    children.push_back(depth + 1 < dims() ? BuildNode(i, e, depth + 1) : -1);
    i = e;
  }
  nodes_[id].support = std::move(support);
  nodes_[id].cumulative = std::move(cumulative);
  nodes_[id].children = std::move(children);
  return id;
}

std::int64_t EmpiricalJoint::Count(const CellIndex& cell) const {
  auto it = std::lower_bound(
      counts_.begin(), counts_.end(), cell,
      [](const auto& entry, const CellIndex& key) { return entry.first < key; });
  if (it == counts_.end() || it->first != cell) return 0;
  return it->second;
}

std::optional<int> EmpiricalJoint::ValueIndex(std::size_t j, double x) const {
  const auto& vals = values_[j];
  auto it = std::lower_bound(vals.begin(), vals.end(), x);
  if (it == vals.end() || *it != x) return std::nullopt;
  return static_cast<int>(it - vals.begin());
}

std::optional<CellIndex> EmpiricalJoint::Locate(
    std::span<const double> row) const {
  if (row.size() != dims()) {
    throw Error(ErrorCode::kShape, "row width does not match joint");
  }
  CellIndex cell(dims());
  for (std::size_t j = 0; j < dims(); ++j) {
    auto idx = ValueIndex(j, row[j]);
    if (!idx) return std::nullopt;
    cell[j] = *idx;
  }
  return cell;
}

std::vector<double> EmpiricalJoint::ValueOf(const CellIndex& cell) const {
  std::vector<double> out(dims());
  for (std::size_t j = 0; j < dims(); ++j) out[j] = values_[j][cell[j]];
  return out;
}

std::optional<ConditionalView> EmpiricalJoint::Conditional(
    std::span<const int> prefix) const {
  if (prefix.size() >= dims()) {
    throw Error(ErrorCode::kDimension, "conditioning prefix too long");
  }
  int node = 0;
  for (int idx : prefix) {
    const Node& cur = nodes_[node];
    auto it = std::lower_bound(cur.support.begin(), cur.support.end(), idx);
    if (it == cur.support.end() || *it != idx) return std::nullopt;
    node = cur.children[it - cur.support.begin()];
  }
  const Node& cur = nodes_[node];
  ConditionalView view;
  view.support = cur.support;
  view.cumulative = cur.cumulative;
  view.total = cur.cumulative.back();
  return view;
}

std::vector<std::pair<std::vector<double>, double>> EmpiricalJoint::Pmf()
    const {
  std::vector<std::pair<std::vector<double>, double>> out;
  out.reserve(counts_.size());
  for (const auto& [cell, count] : counts_) {
    out.emplace_back(ValueOf(cell), CdfValue(count, total_));
  }
  return out;
}

EmpiricalJoint BuildEmpiricalJoint(const Eigen::MatrixXd& qi) {
  return EmpiricalJoint::Build(qi);
}

namespace {

ConditionalView RequireConditional(const EmpiricalJoint& joint, std::size_t j,
                                   std::span<const double> prefix) {
  if (j >= joint.dims() || prefix.size() != j) {
    throw Error(ErrorCode::kDimension,
                "prefix length must equal the conditioned dimension index");
  }
  std::vector<int> idx(j);
  for (std::size_t t = 0; t < j; ++t) {
    auto found = joint.ValueIndex(t, prefix[t]);
    if (!found) {
      throw Error(ErrorCode::kEmptyCondition,
                  "prefix value is not an observed value");
    }
    idx[t] = *found;
  }
  auto view = joint.Conditional(idx);
  if (!view) {
    throw Error(ErrorCode::kEmptyCondition, "no records match the prefix");
  }
  return *view;
}

}  // namespace

double ConditionalCdf(const EmpiricalJoint& joint, std::size_t j,
                      std::span<const double> prefix, double x) {
  const ConditionalView view = RequireConditional(joint, j, prefix);
  const auto& vals = joint.values(j);
  // Number of distinct values <= x, minus one, is the last index at or below x.
  const int last = static_cast<int>(
      std::upper_bound(vals.begin(), vals.end(), x) - vals.begin()) - 1;
  const std::ptrdiff_t pos = view.PositionAtOrBelow(last);
  if (pos < 0) return 0.0;
  return CdfValue(view.CumulativeThrough(static_cast<std::size_t>(pos)),
                  view.total);
}

int InverseIndex(const ConditionalView& view, double u) {
  if (!(u > 0.0) || u > 1.0) {
    throw Error(ErrorCode::kDomain, "inverse CDF needs u in (0, 1]");
  }
  // First support position with u <= F; binary search over the same
  // CdfValue expressions the forward maps use.
  std::size_t lo = 0;
  std::size_t hi = view.support.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (u <= CdfValue(view.cumulative[mid], view.total)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return view.support[lo];
}

double InverseConditionalCdf(const EmpiricalJoint& joint, std::size_t j,
                             std::span<const double> prefix, double u) {
  if (!(u > 0.0) || u > 1.0) {
    throw Error(ErrorCode::kDomain, "inverse CDF needs u in (0, 1]");
  }
  const ConditionalView view = RequireConditional(joint, j, prefix);
  return joint.values(j)[InverseIndex(view, u)];
}

}  // namespace kdither
