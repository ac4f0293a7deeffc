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

#include "kdither/reid.h"

#include <cmath>
#include <map>
#include <ostream>

#include "kdither/csv.h"
#include "kdither/error.h"
#include "kdither/kernels.h"
#include "kdither/parallel.h"

namespace kdither {
namespace {

using RowGroups = std::map<std::vector<double>, std::vector<std::size_t>>;

RowGroups GroupRows(const Eigen::MatrixXd& m) {
  RowGroups groups;
  std::vector<double> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    groups[row].push_back(static_cast<std::size_t>(i));
  }
  return groups;
}

}  // namespace

std::vector<std::size_t> MatchMinDistance(const DataTable& original,
                                          const Eigen::MatrixXd& anon_qi,
                                          const Standardizer& standardizer,
                                          Rng& rng) {
  if (static_cast<std::size_t>(anon_qi.cols()) != original.dims()) {
    throw Error(ErrorCode::kShape, "anonymized table differs in dimension");
  }
  if (anon_qi.rows() == 0) throw Error(ErrorCode::kEmptyInput, "empty anonymized table");
  const std::size_t d = original.dims();
  const RowGroups anon_groups = GroupRows(standardizer.ApplyQi(anon_qi));
  const RowGroups orig_groups = GroupRows(standardizer.ApplyQi(original.qi()));

  // Distinct anonymized tuples, column-wise for the distance kernel.
  const std::size_t m = anon_groups.size();
  std::vector<std::vector<double>> columns(d, std::vector<double>(m));
  std::vector<const std::vector<std::size_t>*> members;
  members.reserve(m);
  std::size_t t = 0;
  for (const auto& [tuple, records] : anon_groups) {
    for (std::size_t j = 0; j < d; ++j) columns[j][t] = tuple[j];
    members.push_back(&records);
    ++t;
  }
  std::vector<const double*> col_ptrs(d);
  for (std::size_t j = 0; j < d; ++j) col_ptrs[j] = columns[j].data();
  const std::vector<double> unit(d, 1.0);
  std::vector<double> dist(m);

  std::vector<std::size_t> matches(original.rows());
  std::vector<std::size_t> candidates;
  for (const auto& [tuple, records] : orig_groups) {
    kernels::WeightedSqDist(col_ptrs, tuple, unit, m, dist.data());
    const double best = dist[kernels::ArgMin(dist.data(), m)];
    candidates.clear();
    for (std::size_t s = 0; s < m; ++s) {
      if (dist[s] == best) {
        candidates.insert(candidates.end(), members[s]->begin(), members[s]->end());
      }
    }
    for (std::size_t record : records) {
      matches[record] = candidates[rng.Below(candidates.size())];
    }
  }
  return matches;
}

std::vector<std::size_t> MatchMinDistance(const DataTable& original,
                                          const AnonymizedTable& anon,
                                          Rng& rng) {
  return MatchMinDistance(original, anon.qi_hat, Standardize(original).second,
                          rng);
}

double ReidReport::Band() const {
  const double p = Nominal();
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

ReidReport ReidTrials(const Anonymizer& anonymizer, Method method, int trials,
                      std::uint64_t seed, int threads) {
  if (trials < 1) throw Error(ErrorCode::kDomain, "trials must be at least 1");
  const DataTable& original = anonymizer.original();
  const std::size_t n = original.rows();
  std::vector<std::vector<std::uint32_t>> hits(static_cast<std::size_t>(trials));
  ParallelFor(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    const std::uint64_t trial_seed =
        MixSeed(MixSeed(seed, static_cast<std::uint64_t>(Stream::kTrial)), t);
    const AnonymizedTable anon = anonymizer.Transform(method, trial_seed);
    Rng rng = Rng::Substream(seed, Stream::kMatch, t);
    const auto matches =
        MatchMinDistance(original, anon.qi_hat, anonymizer.standardizer(), rng);
    auto& h = hits[t];
    for (std::size_t i = 0; i < n; ++i) {
      if (matches[i] == i) h.push_back(static_cast<std::uint32_t>(i));
    }
  });
  std::vector<std::int64_t> correct(n, 0);
  for (const auto& h : hits) {
    for (std::uint32_t i : h) ++correct[i];
  }

  ReidReport report;
  report.trials = trials;
  report.k = anonymizer.model().k;
  report.method = method;
  report.records = static_cast<std::int64_t>(n);
  for (const auto& [tuple, records] : GroupRows(original.qi())) {
    ClassFrequency cls;
    cls.tuple = tuple;
    cls.size = static_cast<std::int64_t>(records.size());
    for (std::size_t r : records) cls.correct += correct[r];
    cls.frequency = static_cast<double>(cls.correct) /
                    (static_cast<double>(trials) * static_cast<double>(cls.size));
    report.total_correct += cls.correct;
    report.classes.push_back(std::move(cls));
  }
  report.average = static_cast<double>(report.total_correct) /
                   (static_cast<double>(trials) * static_cast<double>(n));
  return report;
}

ReidReport ReidTrials(const DataTable& original, int k, Method method,
                      const AnonymizeParams& params, int trials) {
  AnonymizeParams inner = params;
  inner.threads = 1;
  const Anonymizer anonymizer(original, k, inner);
  return ReidTrials(anonymizer, method, trials, params.seed, params.threads);
}

void WriteClassFrequencyCsv(std::ostream& out, const ReidReport& report,
                            const std::vector<std::string>& qi_names) {
  for (const auto& name : qi_names) out << name << ',';
  out << "size,correct,frequency\n";
  for (const auto& cls : report.classes) {
    for (double v : cls.tuple) out << FormatDouble(v) << ',';
    out << cls.size << ',' << cls.correct << ',' << FormatDouble(cls.frequency)
        << '\n';
  }
}

}  // namespace kdither
