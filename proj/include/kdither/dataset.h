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

#ifndef KDITHER_DATASET_H_
#define KDITHER_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kdither/csv.h"

namespace kdither {

enum class ColumnKind { kOrdinal, kBinary, kContinuous };

std::string_view ColumnKindName(ColumnKind kind);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kOrdinal;
};

// Column roles for loading. Quasi-identifier order fixes the dimension order
// of every conditional chain downstream.
struct Schema {
  std::vector<std::string> qi;
  std::string response;
  std::optional<std::string> id;
  // Quasi-identifiers treated as continuous; rounded to 12 significant digits
  // at load so that distinct values are well defined.
  std::vector<std::string> continuous;
};

// Quasi-identifier matrix (n x d), response vector and column metadata.
class DataTable {
 public:
  DataTable(Eigen::MatrixXd qi, Eigen::VectorXd response,
            std::vector<Column> columns, std::vector<std::string> record_ids);

  // Record ids default to row ordinals.
  DataTable(Eigen::MatrixXd qi, Eigen::VectorXd response);

  std::size_t rows() const { return static_cast<std::size_t>(qi_.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(qi_.cols()); }

  const Eigen::MatrixXd& qi() const { return qi_; }
  const Eigen::VectorXd& response() const { return response_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::string>& record_ids() const { return record_ids_; }

  std::vector<double> Row(std::size_t i) const;

  // Same metadata, different values (shape must match).
  DataTable WithValues(Eigen::MatrixXd qi, Eigen::VectorXd response) const;

 private:
  Eigen::MatrixXd qi_;
  Eigen::VectorXd response_;
  std::vector<Column> columns_;
  std::vector<std::string> record_ids_;
};

DataTable TableFromCsv(const CsvDocument& doc, const Schema& schema);
DataTable LoadTable(const std::string& path, const Schema& schema);

double RoundSignificant(double value, int digits);

struct Standardizer {
  std::vector<double> means;
  std::vector<double> scales;
  std::vector<bool> constant_flags;
  double response_mean = 0.0;
  double response_scale = 1.0;
  bool response_constant = false;

  double Apply(std::size_t j, double x) const;
  double Revert(std::size_t j, double z) const;
  double ApplyResponse(double y) const;
  double RevertResponse(double z) const;

  Eigen::MatrixXd ApplyQi(const Eigen::MatrixXd& qi) const;
  Eigen::MatrixXd RevertQi(const Eigen::MatrixXd& qi) const;
  DataTable Apply(const DataTable& table) const;
  DataTable Revert(const DataTable& table) const;
};

// z-scores with the n-1 denominator. Constant columns (and n = 1) keep
// scale 1 and mean 0, i.e. pass through unchanged.
std::pair<DataTable, Standardizer> Standardize(const DataTable& table);

// Index tuple into the per-dimension distinct values (0-based).
using CellIndex = std::vector<int>;

// Conditional distribution of dimension j given an observed prefix of
// indices: support indices in increasing order with cumulative counts.
struct ConditionalView {
  std::span<const int> support;
  std::span<const std::int64_t> cumulative;
  std::int64_t total = 0;

  // Count of records at support positions [0, pos].
  std::int64_t CumulativeThrough(std::size_t pos) const {
    return cumulative[pos];
  }
  // Largest support position whose value index is <= value_index, or -1.
  std::ptrdiff_t PositionAtOrBelow(int value_index) const;
  std::ptrdiff_t PositionOf(int value_index) const;
};

// CDF value for a cumulative count. Every forward and inverse evaluation of
// an empirical conditional CDF goes through this so their arithmetic agrees.
inline double CdfValue(std::int64_t cumulative, std::int64_t total) {
  return static_cast<double>(cumulative) / static_cast<double>(total);
}

// Distinct per-dimension values and sparse joint counts of a sample.
class EmpiricalJoint {
 public:
  static EmpiricalJoint Build(const Eigen::MatrixXd& qi);

  std::size_t dims() const { return values_.size(); }
  std::int64_t total() const { return total_; }
  const std::vector<double>& values(std::size_t j) const { return values_[j]; }
  // Sorted lexicographically by index tuple.
  const std::vector<std::pair<CellIndex, std::int64_t>>& counts() const {
    return counts_;
  }
  std::int64_t Count(const CellIndex& cell) const;

  std::optional<int> ValueIndex(std::size_t j, double x) const;
  // Index tuple of an observed row; nullopt if any coordinate is unobserved.
  std::optional<CellIndex> Locate(std::span<const double> row) const;
  std::vector<double> ValueOf(const CellIndex& cell) const;

  // Conditional structure of dimension prefix.size() given the prefix.
  // Returns nullopt when no record matches the prefix.
  std::optional<ConditionalView> Conditional(std::span<const int> prefix) const;

  // Distinct rows with their empirical probabilities.
  std::vector<std::pair<std::vector<double>, double>> Pmf() const;

 private:
  struct Node {
    std::vector<int> support;
    std::vector<std::int64_t> cumulative;
    std::vector<int> children;  // node index per support entry, -1 at leaves
  };

  int BuildNode(std::size_t lo, std::size_t hi, std::size_t depth);

  std::vector<std::vector<double>> values_;
  std::vector<std::pair<CellIndex, std::int64_t>> counts_;
  std::int64_t total_ = 0;
  std::vector<Node> nodes_;
};

EmpiricalJoint BuildEmpiricalJoint(const Eigen::MatrixXd& qi);

// F_{X_j | X^{j-1}}(x | prefix) for a prefix of observed values.
double ConditionalCdf(const EmpiricalJoint& joint, std::size_t j,
                      std::span<const double> prefix, double x);

// Generalized inverse: the unique observed v with F(prev) < u <= F(v).
double InverseConditionalCdf(const EmpiricalJoint& joint, std::size_t j,
                             std::span<const double> prefix, double u);

// Index form of the inverse on a conditional view.
int InverseIndex(const ConditionalView& view, double u);

}  // namespace kdither

#endif  // KDITHER_DATASET_H_
