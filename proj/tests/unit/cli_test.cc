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

#include "cli.h"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kdither/csv.h"

namespace kdither {
namespace {

namespace fs = std::filesystem;

class CliTest : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kdither_cli_" + std::to_string(::getpid()) + "_" +
            testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    input_ = Path("in.csv");
    std::ofstream f(input_);
    f << "id,a,b,y\n";
    std::mt19937_64 gen(5);
    for (int i = 0; i < 60; ++i) {
      const int a = static_cast<int>(gen() % 4) + 1;
      const int b = static_cast<int>(gen() % 3) + 1;
      f << "r" << i << ',' << a << ',' << b << ',' << (a + 2 * b + (i % 3) * 0.1)
        << '\n';
    }
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "kdither");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return RunCli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::vector<std::string> TableArgs() const {
    return {"--input", input_, "--qi-cols", "a,b", "--response-col", "y", "--id-col", "id"};
  }

  static nlohmann::json ReadJson(const std::string& path) {
    std::ifstream f(path);
    return nlohmann::json::parse(f);
  }

  fs::path dir_;
  std::string input_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, AnonymizeWritesTableAndSidecar) {
  auto args = TableArgs();
  args.insert(args.begin(), "anonymize");
  for (const char* a : {"--k", "5", "--method", "gaussian", "--seed", "3",
                        "--output"}) {
    args.push_back(a);
  }
  args.push_back(Path("out.csv"));
  args.push_back("--assignment");
  args.push_back(Path("assign.csv"));
  ASSERT_EQ(Run(args), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("wrote"), std::string::npos);

  const CsvDocument in = ReadCsvFile(input_);
  const CsvDocument out = ReadCsvFile(Path("out.csv"));
  EXPECT_EQ(out.header, in.header);
  ASSERT_EQ(out.rows.size(), in.rows.size());
  for (std::size_t i = 0; i < in.rows.size(); ++i) {
    EXPECT_EQ(out.rows[i][0], in.rows[i][0]);
    EXPECT_EQ(out.rows[i][3], in.rows[i][3]);
  }
  const nlohmann::json sidecar = ReadJson(Path("out.csv.json"));
  EXPECT_EQ(sidecar["method"], "gaussian");
  EXPECT_EQ(sidecar["k"], 5);
  EXPECT_GE(sidecar["min_cluster_size"].get<int>(), 5);
  EXPECT_FALSE(sidecar.contains("created_unix_ms"));

  const CsvDocument assign = ReadCsvFile(Path("assign.csv"));
  EXPECT_EQ(assign.header, (std::vector<std::string>{"record_id", "cluster_index"}));
  EXPECT_EQ(assign.rows.size(), 60u);
}

TEST_F(CliTest, AnonymizeIsReproducible) {
  auto args = TableArgs();
  args.insert(args.begin(), "anonymize");
  for (const char* a : {"--k", "4", "--seed", "9", "--output"}) args.push_back(a);
  args.push_back(Path("one.csv"));
  ASSERT_EQ(Run(args), kExitOk);
  args.back() = Path("two.csv");
  ASSERT_EQ(Run(args), kExitOk);
  std::ifstream a(Path("one.csv")), b(Path("two.csv"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, InfeasibleKIsADataError) {
  auto args = TableArgs();
  args.insert(args.begin(), "anonymize");
  for (const char* a : {"--k", "61", "--output"}) args.push_back(a);
  args.push_back(Path("out.csv"));
  EXPECT_EQ(Run(args), kExitData);
  EXPECT_NE(err_.str().find("infeasible k"), std::string::npos);
  EXPECT_FALSE(fs::exists(Path("out.csv")));
}

TEST_F(CliTest, MissingColumnIsADataError) {
  EXPECT_EQ(Run({"anonymize", "--input", input_, "--qi-cols", "a,zz", "--response-col",
                 "y", "--k", "3", "--output", Path("out.csv")}),
            kExitData);
}

TEST_F(CliTest, UsageErrors) {
  auto args = TableArgs();
  args.insert(args.begin(), "anonymize");
  for (const char* a : {"--k", "3", "--method", "blur", "--output"}) args.push_back(a);
  args.push_back(Path("out.csv"));
  EXPECT_EQ(Run(args), kExitUsage);
  EXPECT_EQ(Run({"experiment", "--k-grid", ""}), kExitUsage);
  EXPECT_EQ(Run({"experiment", "--k-grid"}), kExitUsage);
  EXPECT_EQ(Run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(Run({}), kExitUsage);
  EXPECT_EQ(Run({"anonymize", "--k", "3"}), kExitUsage);
}

TEST_F(CliTest, HelpExitsCleanly) {
  EXPECT_EQ(Run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("anonymize"), std::string::npos);
}

TEST_F(CliTest, ReidReportsAndWritesClasses) {
  auto args = TableArgs();
  args.insert(args.begin(), "reid");
  for (const char* a : {"--k", "6", "--method", "resample", "--trials", "20",
                        "--classes-csv"}) {
    args.push_back(a);
  }
  args.push_back(Path("classes.csv"));
  ASSERT_EQ(Run(args), kExitOk) << err_.str();
  const nlohmann::json report = nlohmann::json::parse(out_.str());
  EXPECT_EQ(report["trials"], 20);
  EXPECT_EQ(report["records"], 60);
  EXPECT_NEAR(report["nominal"].get<double>(), 1.0 / 6.0, 1e-12);
  const CsvDocument classes = ReadCsvFile(Path("classes.csv"));
  EXPECT_EQ(classes.header,
            (std::vector<std::string>{"a", "b", "size", "correct", "frequency"}));
}

TEST_F(CliTest, ExperimentMatchesAcrossThreads) {
  const std::vector<std::string> base = {
      "experiment", "--levels", "3,2", "--n-train", "120", "--n-test", "120",
      "--k-grid", "2,10", "--trials", "3", "--seed", "4"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1", "--output", Path("e1.json")});
  auto four = base;
  four.insert(four.end(), {"--threads", "4", "--output", Path("e4.json")});
  ASSERT_EQ(Run(one), kExitOk) << err_.str();
  ASSERT_EQ(Run(four), kExitOk) << err_.str();
  EXPECT_EQ(ReadJson(Path("e1.json")), ReadJson(Path("e4.json")));
  EXPECT_EQ(ReadJson(Path("e1.json"))["results"].size(), 6u);
}

TEST_F(CliTest, WeightsForIdenticalTables) {
  auto args = TableArgs();
  args.insert(args.begin(), "weights");
  args.push_back("--target");
  args.push_back(input_);
  ASSERT_EQ(Run(args), kExitOk) << err_.str();
  const nlohmann::json doc = nlohmann::json::parse(out_.str());
  ASSERT_TRUE(doc.contains("weights"));
  for (const auto& w : doc["weights"]) EXPECT_NEAR(w.get<double>(), 1.0, 1e-12);
}

}  // namespace
}  // namespace kdither
