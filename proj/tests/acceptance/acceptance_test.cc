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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Tolerances and sizes are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kdither/experiment.h"
#include "kdither/kmember.h"
#include "kdither/pipeline.h"
#include "kdither/reid.h"
#include "kdither/report.h"
#include "kdither/rng.h"
#include "kdither/rosenblatt.h"
#include "kdither/shiftlearn.h"
#include "kdither/synthetic.h"
#include "oracles/gaussian_oracle.h"
#include "oracles/partition_oracle.h"
#include "oracles/rational_oracle.h"
#include "oracles/stats_oracle.h"
#include "test_support.h"

namespace kdither {
namespace {

// Criterion 1.
constexpr int kExactInstances = 25;
constexpr int kDrawsPerRecord = 4;
constexpr double kExactSeconds = 10.0;
// Criterion 3.
constexpr int kKsDraws = 10000;
constexpr int kCorrDraws = 100000;
constexpr double kKsMinP = 0.01;
constexpr double kMaxCorr = 0.02;
// Criterion 4.
constexpr int kTvDraws = 100000;
constexpr double kMaxTv = 0.02;
// Criterion 5.
constexpr int kLambdaMatrices = 10;
constexpr double kMomentTol = 1e-6;
// Criterion 6.
constexpr int kReidTrials = 500;
// Criterion 7.
constexpr int kTestFunctions = 20;
constexpr double kIdentityTol = 1e-10;
// Criterion 8.
constexpr std::size_t kStudyRecords = 10000;
constexpr double kDriftTol = 0.05;
constexpr double kStudySeconds = 120.0;
// Criterion 9.
constexpr int kFeasibilityInstances = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Outcome CellDitherExactness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(101);
  long long draws = 0;
  long long exact = 0;
  for (int inst = 0; inst < kExactInstances; ++inst) {
    const std::size_t n = 20 + gen() % 481;
    const std::size_t d = 1 + gen() % 3;
    std::vector<int> levels(d);
    for (int& l : levels) l = 2 + static_cast<int>(gen() % 7);
    const int k = 2 + static_cast<int>(gen() % 9);
    const DataTable t = testing::RandomDiscreteTable(n, levels, gen());
    const ClusterModel m = GreedyKMember(t, k, 1.0, gen());
    const EmpiricalJoint j = EmpiricalJoint::Build(t.qi());
    const CellPartition p = BuildCellPartition(j, m);
    const std::uint64_t seed = gen();
    for (std::size_t r = 0; r < n; ++r) {
      for (int s = 0; s < kDrawsPerRecord; ++s) {
        Rng rng = Rng::Substream(seed, Stream::kDither, r * kDrawsPerRecord + s);
        const DitherSample sample = SampleIntraCluster(r, m, p, rng);
        const std::vector<double> got =
            InverseEmpirical(ForwardCellUniform(sample, p, j), j);
        ++draws;
        if (got == j.ValueOf(p.LocateCell(sample.xt))) ++exact;
      }
    }
  }
  const double secs = Seconds(start);
  Outcome o;
  o.pass = exact == draws && secs < kExactSeconds;
  o.detail = std::to_string(exact) + "/" + std::to_string(draws) +
             " draws exact over " + std::to_string(kExactInstances) +
             " instances, " + Fmt("%.2f s", secs);
  return o;
}

Outcome ResampleExactPmf() {
  std::mt19937_64 gen(202);
  int instances = 0;
  int equal = 0;
  for (int inst = 0; inst < 40; ++inst) {
    const std::size_t n = 4 + gen() % 47;
    const int k = 2 + static_cast<int>(gen() % std::min<std::size_t>(n - 1, 8));
    const std::vector<int> levels{2 + static_cast<int>(gen() % 3),
                                  2 + static_cast<int>(gen() % 3)};
    const DataTable t = testing::RandomDiscreteTable(n, levels, gen());
    AnonymizeParams params;
    params.seed = gen();
    const Anonymizer anon(t, k, params);
    // Law of a uniformly chosen output row, from the sampling tables the
    // resample method draws from.
    const EmpiricalJoint raw = EmpiricalJoint::Build(t.qi());
    const CellPartition& p = anon.partition();
    oracle::ExactPmf from_tables;
    for (std::size_t ell = 0; ell < p.cluster_cells.size(); ++ell) {
      const std::int64_t nl = p.cluster_sizes[ell];
      const auto members =
          static_cast<std::int64_t>(anon.model().clusters[ell].size());
      for (const auto& [cell, count] : p.cluster_cells[ell]) {
        from_tables[raw.ValueOf(cell)] +=
            oracle::Rational(members, static_cast<std::int64_t>(n)) *
            oracle::Rational(count, nl);
      }
    }
    const oracle::ExactPmf target = oracle::ExactEmpiricalPmf(t.qi());
    ++instances;
    if (from_tables == target &&
        oracle::ExactResamplePmf(anon.model()) ==
            oracle::ExactEmpiricalPmf(anon.standardized().qi())) {
      ++equal;
    }
  }
  return {equal == instances,
          std::to_string(equal) + "/" + std::to_string(instances) +
              " instances with zero rational error"};
}

Outcome GaussianUniformity() {
  const DataTable t =
      GeneratePopulation(PopulationConfig{{4, 3, 3}, 0.4, 1.3, 1.0}, 600, 0.0, 303);
  AnonymizeParams params;
  params.seed = 303;
  const Anonymizer anon(t, 5, params);
  const GaussianMixture& mix = anon.mixture();
  const std::size_t d = t.dims();
  std::vector<std::vector<double>> u(d);
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(kCorrDraws); ++i) {
    Rng rng = Rng::Substream(304, Stream::kDither, i);
    const DitherSample s = SampleGaussian(i % t.rows(), anon.model(), mix, rng);
    const UniformVector v = ForwardGaussian(s, mix);
    for (std::size_t j = 0; j < d; ++j) u[j].push_back(v.u[j]);
  }
  double min_p = 1.0;
  for (const auto& col : u) {
    const std::vector<double> head(col.begin(), col.begin() + kKsDraws);
    min_p = std::min(min_p, oracle::KsPValue(oracle::KsStatistic(head), head.size()));
  }
  double max_corr = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      max_corr = std::max(max_corr, std::abs(oracle::Correlation(u[a], u[b])));
    }
  }
  return {min_p > kKsMinP && max_corr < kMaxCorr,
          Fmt("min KS p = %.4f, max |corr| = %.4f", min_p, max_corr)};
}

Outcome GaussianPreservation() {
  const DataTable t =
      GeneratePopulation(PopulationConfig{{5, 2, 2}, 0.4, 1.3, 1.0}, 500, 0.0, 404);
  AnonymizeParams params;
  params.seed = 404;
  const Anonymizer anon(t, 5, params);
  std::map<std::vector<double>, double> observed;
  int drawn = 0;
  for (std::uint64_t rep = 0; drawn < kTvDraws; ++rep) {
    const AnonymizedTable out = anon.Transform(Method::kGaussian, MixSeed(405, rep));
    for (Eigen::Index i = 0; i < out.qi_hat.rows() && drawn < kTvDraws; ++i, ++drawn) {
      observed[testing::RowOf(out.qi_hat, i)] += 1.0;
    }
  }
  std::map<std::vector<double>, double> target;
  for (Eigen::Index i = 0; i < t.qi().rows(); ++i) target[testing::RowOf(t.qi(), i)] += 1.0;
  for (auto& [v, c] : observed) c /= kTvDraws;
  for (auto& [v, c] : target) c /= static_cast<double>(t.rows());
  const double tv = oracle::TotalVariation(observed, target);
  return {tv < kMaxTv && target.size() <= 20,
          Fmt("TV = %.5f on %.0f cells", tv, static_cast<double>(target.size()))};
}

Outcome ConditioningOracle() {
  std::mt19937_64 gen(505);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  int checks = 0;
  for (int trial = 0; trial < kLambdaMatrices; ++trial) {
    const int d = 2 + trial % 3;
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd mean(d);
    for (int r = 0; r < d; ++r) {
      mean(r) = 2.0 * normal(gen);
      for (int c = 0; c < d; ++c) a(r, c) = normal(gen);
    }
    ClusterModel m;
    m.k = 1;
    m.assignment = {0};
    Cluster cl;
    cl.members = {0};
    cl.values = mean.transpose();
    cl.centroid_x = mean;
    cl.covariance = a * a.transpose();
    m.clusters.push_back(cl);
    const GaussianMixture g = BuildGaussianMixture(m, 1.0 / 3.0);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (double& v : x) v = mean(&v - x.data()) + 2.0 * normal(gen);
    for (int j = 0; j < d; ++j) {
      const ConditionalMoments cm =
          ConditionGaussian(g, 0, static_cast<std::size_t>(j), x);
      const oracle::Moments want =
          oracle::ConditionalByQuadrature(mean, g.components[0].cov, j, x);
      worst = std::max({worst, std::abs(cm.mean - want.mean),
                        std::abs(cm.variance - want.variance)});
      ++checks;
    }
  }
  return {worst < kMomentTol,
          Fmt("max deviation %.3g over %.0f conditionals", worst, checks)};
}

Outcome ReidentificationBound() {
  const DataTable t = GeneratePopulation(PopulationConfig{}, 1000, 0.0, 606);
  AnonymizeParams params;
  params.seed = 606;
  Outcome o;
  std::ostringstream detail;
  double resample_k5 = 0.0;
  double gaussian_k5 = 0.0;
  for (int k : {5, 10, 25}) {
    const Anonymizer anon(t, k, params);
    const ReidReport r = ReidTrials(anon, Method::kResample, kReidTrials, 607, 1);
    const bool ok = r.average <= r.Nominal() + r.Band();
    o.pass = o.pass && ok;
    detail << "k=" << k << " resample " << Fmt("%.4f", r.average) << " <= "
           << Fmt("%.4f", r.Nominal() + r.Band()) << "; ";
    if (k == 5) {
      resample_k5 = r.average;
      const ReidReport g = ReidTrials(anon, Method::kGaussian, kReidTrials, 607, 1);
      gaussian_k5 = g.average;
      o.pass = o.pass && g.average <= g.Nominal() + g.Band();
    }
  }
  o.pass = o.pass && gaussian_k5 < resample_k5;
  detail << "k=5 gaussian " << Fmt("%.4f", gaussian_k5) << " < resample "
         << Fmt("%.4f", resample_k5);
  o.detail = detail.str();
  return o;
}

Outcome ReweightingIdentity() {
  const DataTable src = GeneratePopulation(PopulationConfig{}, 3000, 0.0, 707);
  // Target drawn from the source rows with a tilt on the first coordinate, so
  // every target value is present in the source.
  std::mt19937_64 gen(708);
  std::vector<double> tilt(src.rows());
  for (std::size_t i = 0; i < src.rows(); ++i) {
    tilt[i] = std::exp(0.4 * src.qi()(static_cast<Eigen::Index>(i), 0));
  }
  std::discrete_distribution<std::size_t> pick(tilt.begin(), tilt.end());
  Eigen::MatrixXd tgt(1200, src.qi().cols());
  for (Eigen::Index r = 0; r < tgt.rows(); ++r) {
    tgt.row(r) = src.qi().row(static_cast<Eigen::Index>(pick(gen)));
  }
  const ShiftWeights w = NonparametricRecordWeights(src.qi(), tgt);
  std::normal_distribution<double> coef(0.0, 2.0);
  double worst = 0.0;
  for (int f = 0; f < kTestFunctions; ++f) {
    std::vector<double> c(8);
    for (double& v : c) v = coef(gen);
    auto g = [&](const Eigen::Ref<const Eigen::RowVectorXd>& x) {
      double s = c[0];
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        s += c[1 + j % 4] * std::sin(c[5] * x(j)) + c[6] * x(j) * x(j) * (j + 1);
      }
      return s + c[7] * std::exp(-x(0));
    };
    double lhs = 0.0, rhs = 0.0;
    for (Eigen::Index i = 0; i < src.qi().rows(); ++i) {
      lhs += w.values[static_cast<std::size_t>(i)] * g(src.qi().row(i));
    }
    lhs /= static_cast<double>(src.rows());
    for (Eigen::Index i = 0; i < tgt.rows(); ++i) rhs += g(tgt.row(i));
    rhs /= static_cast<double>(tgt.rows());
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst <= kIdentityTol,
          Fmt("max |E_w g - E_q g| = %.3g over %.0f functions", worst, kTestFunctions)};
}

const nlohmann::json* FindResult(const nlohmann::json& doc, int k, const char* method) {
  for (const auto& r : doc["results"]) {
    if (r["k"] == k && r["method"] == method) return &r;
  }
  return nullptr;
}

double DummyR2(const nlohmann::json& entry) {
  for (const auto& f : entry["fits"]) {
    if (f["shift"] == "none" && f["coding"] == "dummy") return f["r_squared"].get<double>();
  }
  return std::nan("");
}

Outcome QualitativeStudy() {
  ExperimentConfig config;
  config.n_train = kStudyRecords;
  config.n_test = kStudyRecords;
  config.k_grid = {2, 20, 200};
  config.trials = 0;
  config.seed = 808;
  const auto start = std::chrono::steady_clock::now();
  const nlohmann::json doc = RunExperiment(config);
  const double secs = Seconds(start);
  Outcome o;
  std::ostringstream detail;
  double prev = 2.0;
  detail << "centroid";
  for (int k : config.k_grid) {
    const auto* e = FindResult(doc, k, "centroid");
    const double s = e ? (*e)["similarity"].get<double>() : std::nan("");
    o.pass = o.pass && s < prev;
    prev = s;
    detail << ' ' << Fmt("%.4f", s);
  }
  for (const char* method : {"resample", "gaussian"}) {
    const auto* base = FindResult(doc, 2, method);
    double drift = base ? 0.0 : INFINITY;
    for (int k : config.k_grid) {
      const auto* e = FindResult(doc, k, method);
      if (!base || !e) continue;
      drift = std::max(drift, std::abs((*e)["similarity"].get<double>() -
                                       (*base)["similarity"].get<double>()));
    }
    o.pass = o.pass && drift <= kDriftTol;
    detail << "; " << method << " drift " << Fmt("%.4f", drift);
  }
  const int kmax = config.k_grid.back();
  const auto* c = FindResult(doc, kmax, "centroid");
  const auto* r = FindResult(doc, kmax, "resample");
  const double rc = c ? DummyR2(*c) : std::nan("");
  const double rr = r ? DummyR2(*r) : std::nan("");
  o.pass = o.pass && rc < rr && secs < kStudySeconds;
  detail << "; dummy R2 at k=" << kmax << " centroid " << Fmt("%.4f", rc)
         << " < resample " << Fmt("%.4f", rr) << "; " << Fmt("%.1f s", secs);
  o.detail = detail.str();
  return o;
}

Outcome SolverSanity() {
  std::mt19937_64 gen(909);
  std::normal_distribution<double> normal(0.0, 1.0);
  int small = 0;
  int within = 0;
  double worst_ratio = 0.0;
  std::string worst_case = "none";
  for (int n = 2; n <= 10; ++n) {
    for (int k = 2; k <= n; ++k) {
      for (int rep = 0; rep < 3; ++rep) {
        Eigen::MatrixXd x(n, 2);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
          x(i, 0) = normal(gen);
          x(i, 1) = normal(gen);
          y(i) = normal(gen);
        }
        const DataTable t(x, y);
        const ClusterModel m = GreedyKMember(t, k, 1.0, gen());
        const double greedy = TotalDistortion(m, t);
        const double best = oracle::BruteForceOptimum(x, y, 1.0, k, n / k);
        ++small;
        if (greedy <= 2.0 * best + 1e-12) ++within;
        if (best > 0.0 && greedy / best > worst_ratio) {
          worst_ratio = greedy / best;
          worst_case = "n=" + std::to_string(n) + " k=" + std::to_string(k);
        }
      }
    }
  }
  int feasible = 0;
  for (int inst = 0; inst < kFeasibilityInstances; ++inst) {
    const std::size_t n = 2 + gen() % 199;
    const int k = 2 + static_cast<int>(gen() % std::min<std::size_t>(n - 1, 30));
    const std::vector<int> levels{2 + static_cast<int>(gen() % 7),
                                  2 + static_cast<int>(gen() % 7)};
    const DataTable t = testing::RandomDiscreteTable(n, levels, gen());
    const double w = std::uniform_real_distribution<double>(0.0, 2.0)(gen);
    const ClusterModel m = GreedyKMember(t, k, w, gen());
    if (ValidateKAnonymous(m).ok && m.num_clusters() == n / static_cast<std::size_t>(k)) {
      ++feasible;
    }
  }
  return {within == small && feasible == kFeasibilityInstances,
          std::to_string(within) + "/" + std::to_string(small) +
              " small instances within 2x (worst ratio " + Fmt("%.3f", worst_ratio) +
              " at " + worst_case + "), " + std::to_string(feasible) + "/" +
              std::to_string(kFeasibilityInstances) + " feasible"};
}

Outcome Determinism() {
  ExperimentConfig config;
  config.n_train = 2000;
  config.n_test = 2000;
  config.tilt = 0.3;
  config.k_grid = {2, 20, 200};
  config.methods = {Method::kCentroid, Method::kResample, Method::kPermute,
                    Method::kCellDither, Method::kGaussian};
  config.shifts = {ShiftEstimator::kNone, ShiftEstimator::kNonparametric,
                   ShiftEstimator::kLogistic};
  config.trials = 10;
  config.seed = 1010;
  config.threads = 1;
  const std::string one = DumpJson(RunExperiment(config));
  const std::string again = DumpJson(RunExperiment(config));
  config.threads = 4;
  const std::string four = DumpJson(RunExperiment(config));
  return {one == again && one == four,
          std::to_string(one.size()) + " bytes; repeat " +
              (one == again ? "identical" : "differs") + ", 4 threads " +
              (one == four ? "identical" : "differs")};
}

}  // namespace
}  // namespace kdither

// Optional arguments select criteria by number; the default runs all.
int main(int argc, char** argv) {
  using kdither::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cell dither forward/inverse exactness", kdither::CellDitherExactness},
      {"resample output PMF equals empirical PMF exactly", kdither::ResampleExactPmf},
      {"gaussian forward transform uniform and uncorrelated", kdither::GaussianUniformity},
      {"gaussian end-to-end PMF preservation", kdither::GaussianPreservation},
      {"gaussian conditioning matches quadrature", kdither::ConditioningOracle},
      {"reidentification at or below 1/k", kdither::ReidentificationBound},
      {"nonparametric reweighting identity", kdither::ReweightingIdentity},
      {"similarity and R2 trends over k", kdither::QualitativeStudy},
      {"greedy clustering quality and feasibility", kdither::SolverSanity},
      {"experiment output deterministic", kdither::Determinism},
  };
  std::vector<bool> selected(criteria.size(), argc < 2);
  for (int a = 1; a < argc; ++a) {
    const int id = std::atoi(argv[a]);
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %s\n", argv[a]);
      return 2;
    }
    selected[static_cast<std::size_t>(id - 1)] = true;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
