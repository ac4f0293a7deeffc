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

#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kdither/csv.h"
#include "kdither/error.h"
#include "kdither/experiment.h"
#include "kdither/kmember.h"
#include "kdither/pipeline.h"
#include "kdither/reid.h"
#include "kdither/report.h"
#include "kdither/shiftlearn.h"

namespace kdither {
namespace {

// Raised for bad flag values that CLI11 cannot check on its own.
struct UsageError {
  std::string message;
};

struct TableFlags {
  std::string input;
  std::vector<std::string> qi_cols;
  std::string response_col;
  std::string id_col;
  std::vector<std::string> continuous_cols;

  Schema ToSchema() const {
    Schema schema;
    schema.qi = qi_cols;
    schema.response = response_col;
    if (!id_col.empty()) schema.id = id_col;
    schema.continuous = continuous_cols;
    return schema;
  }
};

struct ModelFlags {
  int k = 0;
  std::string method = "resample";
  double alpha = 1.0 / 3.0;
  double w = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

void AddTableFlags(CLI::App* app, TableFlags& flags) {
  app->add_option("--input", flags.input, "Input CSV")->required();
  app->add_option("--qi-cols", flags.qi_cols,
                  "Quasi-identifier columns, comma separated, in chain order")
      ->required()
      ->delimiter(',');
  app->add_option("--response-col", flags.response_col, "Response column")
      ->required();
  app->add_option("--id-col", flags.id_col, "Record id column");
  app->add_option("--continuous-cols", flags.continuous_cols,
                  "Quasi-identifiers rounded to 12 significant digits")
      ->delimiter(',');
}

void AddModelFlags(CLI::App* app, ModelFlags& flags) {
  app->add_option("--k", flags.k, "Minimum cluster size")->required();
  app->add_option("--method", flags.method,
                  "centroid|resample|permute|cell-dither|gaussian");
  app->add_option("--alpha", flags.alpha, "Diagonal loading of the Gaussian dither");
  app->add_option("--w", flags.w, "Response weight in the clustering distance");
  app->add_option("--seed", flags.seed, "Master seed");
  app->add_option("--threads", flags.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
}

Method CheckedMethod(const ModelFlags& flags) {
  const auto method = ParseMethod(flags.method);
  if (!method) throw UsageError{"unknown method \"" + flags.method + "\""};
  if (flags.k < 2) throw UsageError{"--k must be at least 2"};
  if (*method == Method::kGaussian && !(flags.alpha > 0.0)) {
    throw UsageError{"--alpha must be positive for the gaussian method"};
  }
  if (!(flags.w > 0.0)) throw UsageError{"--w must be positive"};
  return *method;
}

AnonymizeParams ToParams(const ModelFlags& flags) {
  AnonymizeParams params;
  params.alpha = flags.alpha;
  params.w = flags.w;
  params.seed = flags.seed;
  params.threads = flags.threads;
  return params;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

void WriteText(const std::string& path, const std::string& text) {
  auto out = OpenOutput(path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

struct AnonymizeFlags {
  TableFlags table;
  ModelFlags model;
  std::string output;
  std::string assignment;
  bool stamp = false;
};

int RunAnonymize(const AnonymizeFlags& flags, std::ostream& out) {
  const Method method = CheckedMethod(flags.model);
  const CsvDocument doc = ReadCsvFile(flags.table.input);
  const DataTable table = TableFromCsv(doc, flags.table.ToSchema());
  const AnonymizeParams params = ToParams(flags.model);
  const Anonymizer anonymizer(table, flags.model.k, params);
  const AnonymizedTable anon = anonymizer.Transform(method, params.seed);

  // Same header and row order; only quasi-identifier cells change.
  CsvDocument result = doc;
  for (std::size_t j = 0; j < flags.table.qi_cols.size(); ++j) {
    const std::size_t col = *doc.ColumnIndex(flags.table.qi_cols[j]);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      result.rows[i][col] = FormatDouble(
          anon.qi_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  WriteCsvFile(flags.output, result);

  nlohmann::json sidecar = SidecarJson(anon, anonymizer.model());
  sidecar["config"] = {{"input", flags.table.input},
                       {"qi_cols", flags.table.qi_cols},
                       {"response_col", flags.table.response_col},
                       {"id_col", flags.table.id_col},
                       {"continuous_cols", flags.table.continuous_cols},
                       {"threads", flags.model.threads}};
  if (flags.stamp) {
    const auto now = std::chrono::system_clock::now();
    sidecar["created_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch())
            .count();
  }
  WriteText(flags.output + ".json", DumpJson(sidecar));

  if (!flags.assignment.empty()) {
    auto file = OpenOutput(flags.assignment);
    WriteAssignmentCsv(file, anonymizer.model(), table.record_ids());
  }
  out << "wrote " << flags.output << " (" << table.rows() << " records, "
      << anonymizer.model().num_clusters() << " clusters)\n";
  return kExitOk;
}

struct ReidFlags {
  TableFlags table;
  ModelFlags model;
  int trials = 100;
  std::string output;
  std::string classes;
};

int RunReid(const ReidFlags& flags, std::ostream& out) {
  const Method method = CheckedMethod(flags.model);
  if (flags.trials < 1) throw UsageError{"--trials must be at least 1"};
  const DataTable table = LoadTable(flags.table.input, flags.table.ToSchema());
  const Anonymizer anonymizer(table, flags.model.k, ToParams(flags.model));
  const ReidReport report = ReidTrials(anonymizer, method, flags.trials,
                                       flags.model.seed, flags.model.threads);
  nlohmann::json doc = ToJson(report);
  doc["config"] = {{"input", flags.table.input},
                   {"qi_cols", flags.table.qi_cols},
                   {"response_col", flags.table.response_col},
                   {"k", flags.model.k},
                   {"method", std::string(MethodName(method))},
                   {"alpha", flags.model.alpha},
                   {"w", flags.model.w},
                   {"seed", flags.model.seed},
                   {"trials", flags.trials}};
  const std::string text = DumpJson(doc);
  if (flags.output.empty()) {
    out << text;
  } else {
    WriteText(flags.output, text);
  }
  if (!flags.classes.empty()) {
    auto file = OpenOutput(flags.classes);
    WriteClassFrequencyCsv(file, report, flags.table.qi_cols);
  }
  return kExitOk;
}

struct ExperimentFlags {
  std::vector<int> levels{8, 2, 6, 5};
  double dependence = 0.3;
  double skew = 1.3;
  double noise = 1.0;
  std::size_t n_train = 1000;
  std::size_t n_test = 1000;
  double tilt = 0.0;
  std::vector<int> k_grid{2, 20, 200};
  std::vector<std::string> methods{"centroid", "resample", "gaussian"};
  std::vector<std::string> shifts{"none"};
  std::vector<std::string> codings{"dummy", "numeric"};
  double alpha = 1.0 / 3.0;
  double w = 1.0;
  std::uint64_t seed = 0;
  int trials = 20;
  int threads = 1;
  std::string output;
};

ExperimentConfig ToExperimentConfig(const ExperimentFlags& flags) {
  ExperimentConfig config;
  config.population.levels = flags.levels;
  config.population.dependence = flags.dependence;
  config.population.skew = flags.skew;
  config.population.noise = flags.noise;
  config.n_train = flags.n_train;
  config.n_test = flags.n_test;
  config.tilt = flags.tilt;
  if (flags.k_grid.empty()) throw UsageError{"empty k grid"};
  for (int k : flags.k_grid) {
    if (k < 2) throw UsageError{"k grid entries must be at least 2"};
  }
  config.k_grid = flags.k_grid;
  config.methods.clear();
  for (const auto& name : flags.methods) {
    const auto m = ParseMethod(name);
    if (!m) throw UsageError{"unknown method \"" + name + "\""};
    config.methods.push_back(*m);
  }
  if (config.methods.empty()) throw UsageError{"no methods given"};
  config.shifts.clear();
  for (const auto& name : flags.shifts) {
    const auto s = ParseShiftEstimator(name);
    if (!s) throw UsageError{"unknown shift estimator \"" + name + "\""};
    config.shifts.push_back(*s);
  }
  config.codings.clear();
  for (const auto& name : flags.codings) {
    const auto c = ParseCoding(name);
    if (!c) throw UsageError{"unknown coding \"" + name + "\""};
    config.codings.push_back(*c);
  }
  if (!(flags.alpha > 0.0)) throw UsageError{"--alpha must be positive"};
  if (flags.levels.empty()) throw UsageError{"--levels must not be empty"};
  for (int l : flags.levels) {
    if (l < 1) throw UsageError{"--levels entries must be positive"};
  }
  config.alpha = flags.alpha;
  config.w = flags.w;
  config.seed = flags.seed;
  config.trials = flags.trials;
  config.threads = flags.threads;
  return config;
}

int RunExperimentCommand(const ExperimentFlags& flags, std::ostream& out) {
  const ExperimentConfig config = ToExperimentConfig(flags);
  const std::string text = DumpJson(RunExperiment(config));
  if (flags.output.empty()) {
    out << text;
  } else {
    WriteText(flags.output, text);
  }
  return kExitOk;
}

struct WeightsFlags {
  TableFlags source;
  std::string target;
  std::string shift = "nonparametric";
  bool normalize = true;
  std::string output;
};

int RunWeights(const WeightsFlags& flags, std::ostream& out) {
  const auto estimator = ParseShiftEstimator(flags.shift);
  if (!estimator) throw UsageError{"unknown shift estimator \"" + flags.shift + "\""};
  const Schema schema = flags.source.ToSchema();
  const DataTable source = LoadTable(flags.source.input, schema);
  const DataTable target = LoadTable(flags.target, schema);
  ShiftWeights weights;
  switch (*estimator) {
    case ShiftEstimator::kNone:
      weights.values.assign(source.rows(), 1.0);
      weights.normalized = true;
      break;
    case ShiftEstimator::kNonparametric:
      weights = NonparametricRecordWeights(source.qi(), target.qi(), flags.normalize);
      break;
    case ShiftEstimator::kLogistic: {
      Eigen::MatrixXd pooled(source.qi().rows() + target.qi().rows(),
                             source.qi().cols());
      pooled << source.qi(), target.qi();
      std::vector<int> labels(source.rows(), 0);
      labels.resize(source.rows() + target.rows(), 1);
      weights = LogisticWeights(pooled, labels);
      break;
    }
  }
  nlohmann::json doc = ToJson(weights);
  doc["spec_version"] = kSchemaVersion;
  doc["record_ids"] = source.record_ids();
  doc["config"] = {{"source", flags.source.input},
                   {"target", flags.target},
                   {"qi_cols", flags.source.qi_cols},
                   {"response_col", flags.source.response_col},
                   {"shift", flags.shift},
                   {"normalize", flags.normalize}};
  const std::string text = DumpJson(doc);
  if (flags.output.empty()) {
    out << text;
  } else {
    WriteText(flags.output, text);
  }
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"k-anonymous microdata with distribution-preserving dither",
               "kdither"};
  app.require_subcommand(1);

  AnonymizeFlags anonymize;
  CLI::App* anon_cmd = app.add_subcommand("anonymize", "Anonymize a CSV table");
  AddTableFlags(anon_cmd, anonymize.table);
  AddModelFlags(anon_cmd, anonymize.model);
  anon_cmd->add_option("--output", anonymize.output,
                       "Output CSV; the sidecar goes to <output>.json")
      ->required();
  anon_cmd->add_option("--assignment", anonymize.assignment,
                       "Optional record_id,cluster_index CSV");
  anon_cmd->add_flag("--stamp", anonymize.stamp,
                     "Record the wall-clock time in the sidecar");

  ReidFlags reid;
  CLI::App* reid_cmd =
      app.add_subcommand("reid", "Measure reidentification frequency");
  AddTableFlags(reid_cmd, reid.table);
  AddModelFlags(reid_cmd, reid.model);
  reid_cmd->add_option("--trials", reid.trials, "Number of trials");
  reid_cmd->add_option("--output", reid.output, "JSON report (default stdout)");
  reid_cmd->add_option("--classes-csv", reid.classes,
                       "Per-class frequency CSV");

  ExperimentFlags experiment;
  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "Run the synthetic train/test study");
  exp_cmd->add_option("--levels", experiment.levels, "Levels per quasi-identifier")
      ->delimiter(',');
  exp_cmd->add_option("--dependence", experiment.dependence,
                      "Latent equicorrelation in [0, 1)");
  exp_cmd->add_option("--skew", experiment.skew, "Marginal skew exponent");
  exp_cmd->add_option("--noise", experiment.noise, "Response noise scale");
  exp_cmd->add_option("--n-train", experiment.n_train, "Training records");
  exp_cmd->add_option("--n-test", experiment.n_test, "Test records");
  exp_cmd->add_option("--tilt", experiment.tilt,
                      "Exponential tilt of the first marginal in the test sample");
  exp_cmd->add_option("--k-grid", experiment.k_grid, "k values, comma separated")
      ->delimiter(',')
      ->expected(0, -1);
  exp_cmd->add_option("--method", experiment.methods, "Methods, comma separated")
      ->delimiter(',');
  exp_cmd->add_option("--shift", experiment.shifts,
                      "none|nonparametric|logistic, comma separated")
      ->delimiter(',');
  exp_cmd->add_option("--coding", experiment.codings,
                      "dummy|numeric, comma separated")
      ->delimiter(',');
  exp_cmd->add_option("--alpha", experiment.alpha, "Diagonal loading");
  exp_cmd->add_option("--w", experiment.w, "Response weight in the distance");
  exp_cmd->add_option("--seed", experiment.seed, "Master seed");
  exp_cmd->add_option("--trials", experiment.trials, "Reidentification trials");
  exp_cmd->add_option("--threads", experiment.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--output", experiment.output, "JSON output (default stdout)");

  WeightsFlags weights;
  CLI::App* weights_cmd =
      app.add_subcommand("weights", "Covariate-shift weights of a source table");
  AddTableFlags(weights_cmd, weights.source);
  weights_cmd->add_option("--target", weights.target, "Target CSV")->required();
  weights_cmd->add_option("--shift", weights.shift, "nonparametric|logistic|none");
  weights_cmd->add_flag("!--raw", weights.normalize,
                        "Skip mean-one normalization");
  weights_cmd->add_option("--output", weights.output, "JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (anon_cmd->parsed()) return RunAnonymize(anonymize, out);
    if (reid_cmd->parsed()) return RunReid(reid, out);
    if (exp_cmd->parsed()) return RunExperimentCommand(experiment, out);
    if (weights_cmd->parsed()) return RunWeights(weights, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace kdither
