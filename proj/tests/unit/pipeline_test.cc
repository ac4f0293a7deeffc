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

#include "kdither/pipeline.h"

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "oracles/rational_oracle.h"
#include "oracles/stats_oracle.h"
#include "test_support.h"

namespace kdither {
namespace {

using testing::ExpectErrorCode;
using testing::RowOf;
using testing::TableFromRows;

constexpr Method kAllMethods[] = {Method::kCentroid, Method::kResample,
                                  Method::kPermute, Method::kCellDither,
                                  Method::kGaussian};

TEST(MethodTest, ParseAndName) {
  EXPECT_EQ(ParseMethod("cell-dither"), Method::kCellDither);
  EXPECT_EQ(ParseMethod("cell_dither"), Method::kCellDither);
  EXPECT_EQ(ParseMethod("gaussian"), Method::kGaussian);
  EXPECT_FALSE(ParseMethod("median").has_value());
  for (Method m : kAllMethods) EXPECT_EQ(ParseMethod(MethodName(m)), m);
}

TEST(AnonymizeTest, CentroidWithKEqualsNIsGlobalMean) {
  const DataTable t = testing::RandomDiscreteTable(12, {5, 3}, 4);
  const AnonymizedTable a = Anonymize(t, 12, Method::kCentroid, {});
  const Eigen::RowVectorXd mean = t.qi().colwise().mean();
  for (Eigen::Index i = 0; i < a.qi_hat.rows(); ++i) {
    EXPECT_LE((a.qi_hat.row(i) - mean).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AnonymizeTest, ResampleSelectsByClusterCounts) {
  // Greedy puts {1,1,2} together and {10,10} together.
  const DataTable t = TableFromRows({{1}, {1}, {2}, {10}, {10}});
  Anonymizer anon(t, 2, {});
  ASSERT_EQ(anon.model().assignment[0], anon.model().assignment[2]);
  ASSERT_EQ(anon.model().clusters[static_cast<std::size_t>(anon.model().assignment[0])].size(), 3u);
  constexpr int kDraws = 30000;
  int hits = 0;
  for (int s = 0; s < kDraws; ++s) {
    if (anon.Transform(Method::kResample, static_cast<std::uint64_t>(s)).qi_hat(2, 0) == 1.0) ++hits;
  }
  const double p = 2.0 / 3.0;
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, p, 4 * std::sqrt(p * (1 - p) / kDraws));
}

TEST(AnonymizeTest, KOutOfRange) {
  const DataTable t = TableFromRows({{1}, {2}, {3}});
  ExpectErrorCode([&] { Anonymize(t, 4, Method::kResample, {}); }, ErrorCode::kInfeasible);
  ExpectErrorCode([&] { Anonymize(t, 1, Method::kResample, {}); }, ErrorCode::kDomain);
  AnonymizeParams no_alpha;
  no_alpha.alpha = 0.0;
  ExpectErrorCode([&] { Anonymize(t, 2, Method::kGaussian, no_alpha); }, ErrorCode::kDomain);
}

TEST(AnonymizeProperty, ResponseIntactAndValuesObserved) {
  const DataTable t = testing::RandomDiscreteTable(90, {5, 2, 4}, 13);
  std::vector<std::set<double>> observed(t.dims());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.dims(); ++j) observed[j].insert(t.qi()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  Anonymizer anon(t, 5, {});
  for (Method m : kAllMethods) {
    const AnonymizedTable a = anon.Transform(m, 3);
    ASSERT_EQ(a.qi_hat.rows(), t.qi().rows());
    EXPECT_EQ(a.response, t.response()) << MethodName(m);
    EXPECT_EQ(a.method, m);
    if (m == Method::kCentroid) continue;
    for (Eigen::Index i = 0; i < a.qi_hat.rows(); ++i) {
      for (std::size_t j = 0; j < t.dims(); ++j) {
        EXPECT_TRUE(observed[j].count(a.qi_hat(i, static_cast<Eigen::Index>(j))))
            << MethodName(m);
      }
    }
  }
}

TEST(AnonymizeProperty, OutputsComeFromOwnCluster) {
  const DataTable t = testing::RandomDiscreteTable(80, {4, 4}, 3);
  Anonymizer anon(t, 4, {});
  const ClusterModel& model = anon.model();
  for (Method m : {Method::kResample, Method::kPermute, Method::kCellDither}) {
    const AnonymizedTable a = anon.Transform(m, 8);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const Cluster& c = model.clusters[static_cast<std::size_t>(model.assignment[i])];
      bool found = false;
      for (std::size_t r : c.members) {
        found = found || RowOf(t.qi(), static_cast<Eigen::Index>(r)) ==
                             RowOf(a.qi_hat, static_cast<Eigen::Index>(i));
      }
      EXPECT_TRUE(found) << MethodName(m) << " record " << i;
    }
  }
}

TEST(AnonymizeProperty, DeterministicAndThreadIndependent) {
  const DataTable t = testing::RandomDiscreteTable(120, {6, 3, 3}, 1);
  AnonymizeParams one;
  one.seed = 5;
  AnonymizeParams many = one;
  many.threads = 4;
  const Anonymizer a(t, 4, one), b(t, 4, many);
  for (Method m : kAllMethods) {
    EXPECT_EQ(a.Transform(m, 9).qi_hat, b.Transform(m, 9).qi_hat) << MethodName(m);
    EXPECT_EQ(a.Transform(m, 9).qi_hat, a.Transform(m, 9).qi_hat) << MethodName(m);
  }
}

TEST(AnonymizeProperty, PermuteKeepsClusterMultisets) {
  const DataTable t = testing::RandomDiscreteTable(60, {3, 5}, 2);
  Anonymizer anon(t, 6, {});
  const AnonymizedTable a = anon.Transform(Method::kPermute, 4);
  for (const Cluster& c : anon.model().clusters) {
    std::multiset<std::vector<double>> before, after;
    for (std::size_t r : c.members) {
      before.insert(RowOf(t.qi(), static_cast<Eigen::Index>(r)));
      after.insert(RowOf(a.qi_hat, static_cast<Eigen::Index>(r)));
    }
    EXPECT_EQ(before, after);
  }
}

// Per-record selection law of the cell dither equals that of resampling.
TEST(AnonymizeProperty, CellDitherSelectsLikeResample) {
  const DataTable t = TableFromRows({{1, 1}, {1, 2}, {2, 1}, {2, 1}, {3, 3},
                                     {3, 2}, {1, 1}, {2, 2}, {3, 3}});
  Anonymizer anon(t, 3, {});
  const std::size_t record = 0;
  const auto& model = anon.model();
  const auto ell = static_cast<std::size_t>(model.assignment[record]);
  std::map<std::vector<double>, double> want;
  std::map<std::vector<double>, long long> seen;
  const Cluster& c = model.clusters[ell];
  for (std::size_t r : c.members) {
    want[RowOf(t.qi(), static_cast<Eigen::Index>(r))] += 1.0 / static_cast<double>(c.size());
  }
  for (std::uint64_t s = 0; s < 20000; ++s) {
    ++seen[RowOf(anon.Transform(Method::kCellDither, s).qi_hat, record)];
  }
  EXPECT_GT(oracle::ChiSquarePValue(seen, want), 0.01);
}

TEST(ResampleWithinClustersTest, PermutationAndReplacement) {
  const DataTable t = TableFromRows({{1}, {1}, {1}, {5}, {6}, {7}});
  const ClusterModel m = SummarizeClusters(t, {0, 0, 0, 1, 1, 1}, 3, 1.0);
  const Eigen::MatrixXd perm = ResampleWithinClusters(m, 3, false);
  std::multiset<double> second{perm(3, 0), perm(4, 0), perm(5, 0)};
  EXPECT_EQ(second, (std::multiset<double>{5, 6, 7}));
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Eigen::MatrixXd with = ResampleWithinClusters(m, s, true);
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(with(i, 0), 1.0);
    for (Eigen::Index i = 3; i < 6; ++i) EXPECT_TRUE(with(i, 0) >= 5 && with(i, 0) <= 7);
  }
}

TEST(ResampleWithinClustersTest, LemmaOneExactOnSmallInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DataTable t = testing::RandomDiscreteTable(10 + 4 * seed, {3, 2, 3}, seed);
    const ClusterModel m = GreedyKMember(t, 3, 1.0, seed);
    EXPECT_EQ(oracle::ExactResamplePmf(m), oracle::ExactEmpiricalPmf(t.qi()));
    for (std::size_t c = 0; c < m.num_clusters(); ++c) {
      std::int64_t total = 0;
      for (const auto& [v, count] : ClusterValueCounts(m, c)) total += count;
      EXPECT_EQ(total, static_cast<std::int64_t>(m.clusters[c].size()));
    }
  }
}

}  // namespace
}  // namespace kdither
