/*
 * Copyright 2026 The Povex Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tools/app/commands.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"
#include "nlohmann/json.hpp"
#include "povex/predictor/artifact.h"
#include "povex/predictor/fit.h"
#include "povex/status.h"
#include "povex/tabular/conditional.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"
#include "tools/app/context.h"
#include "tools/app/report.h"
#include "tools/app/service.h"
#include "tools/app/synthetic.h"

namespace povex::app {

using nlohmann::json;

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  switch (GetErrorKind(status).value_or(ErrorKind::kIo)) {
    case ErrorKind::kContrastiveSetTooSmall:
      return kExitContrastiveSet;
    case ErrorKind::kBudgetExceeded:
      return kExitBudget;
    case ErrorKind::kInvalidParams:
      return kExitUsage;
    default:
      return kExitIo;
  }
}

namespace {

int Fail(std::ostream& err, const absl::Status& status) {
  err << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

int Usage(std::ostream& err, absl::string_view message) {
  err << "usage error: " << message << "\n";
  return kExitUsage;
}

absl::Status WriteJson(const std::string& path, const json& value) {
  return predictor::WriteFileAtomically(path, DumpJson(value));
}

absl::StatusOr<json> ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) return MakeError(ErrorKind::kIo, absl::StrCat("cannot open ", path));
  try {
    json value;
    in >> value;
    return value;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kParseError, absl::StrCat(path, ": ", e.what()));
  }
}

absl::Status EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot create directory ", dir, ": ",
                                  ec.message()));
  }
  return absl::OkStatus();
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// `id`, `id1,id2`, or `@file` with one id per line.
absl::StatusOr<std::vector<std::string>> ParseSelector(const std::string& spec) {
  std::vector<std::string> ids;
  if (!spec.empty() && spec[0] == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) {
      return MakeError(ErrorKind::kIo,
                       absl::StrCat("cannot open household list ", spec.substr(1)));
    }
    std::string line;
    while (std::getline(in, line)) {
      const auto id = absl::StripAsciiWhitespace(line);
      if (!id.empty()) ids.emplace_back(id);
    }
  } else {
    std::stringstream ss(spec);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (!id.empty()) ids.push_back(id);
    }
  }
  if (ids.empty()) {
    return MakeError(ErrorKind::kInvalidParams, "no household selected");
  }
  return ids;
}

int RunGenerate(size_t rows, uint64_t seed, const std::string& out_dir,
                std::ostream& out, std::ostream& err) {
  SyntheticOptions options;
  options.rows = rows;
  options.seed = seed;
  if (rows == 0) return Usage(err, "--rows must be positive");
  auto survey = GenerateSynthetic(options);
  if (!survey.ok()) return Fail(err, survey.status());
  if (auto s = EnsureDirectory(out_dir); !s.ok()) return Fail(err, s);
  const std::string csv = JoinPath(out_dir, "survey.csv");
  const std::string schema = JoinPath(out_dir, "schema.json");
  if (auto s = predictor::WriteFileAtomically(
          csv, tabular::DatasetToCsv(survey->dataset, survey->schema));
      !s.ok()) {
    return Fail(err, s);
  }
  if (auto s = WriteJson(schema, tabular::SchemaToJson(survey->schema)); !s.ok()) {
    return Fail(err, s);
  }
  out << "wrote " << csv << " (" << rows << " households)\n";
  out << "wrote " << schema << "\n";
  return kExitOk;
}

struct TrainFlags {
  std::string data, schema, kind, out;
  predictor::TreeEnsembleParams tree;
  double ridge = 0;
  bool no_one_hot = false;
  bool impute = true;
};

int RunTrain(const TrainFlags& flags, std::ostream& out, std::ostream& err) {
  auto schema = tabular::LoadSchema(flags.schema);
  if (!schema.ok()) return Fail(err, schema.status());
  auto dataset = tabular::LoadDataset(flags.data, *schema);
  if (!dataset.ok()) return Fail(err, dataset.status());
  predictor::PreprocessPipeline::Options popts;
  popts.one_hot_discrete = !flags.no_one_hot;
  popts.impute_numeric_mean = flags.impute;
  auto pipeline = predictor::PreprocessPipeline::Fit(*dataset, popts);
  if (!pipeline.ok()) return Fail(err, pipeline.status());

  predictor::ModelArtifact artifact;
  artifact.pipeline = *pipeline;
  if (flags.kind == "linear") {
    predictor::LinearFitOptions lopts;
    lopts.ridge = flags.ridge;
    auto model = predictor::FitLinear(*dataset, *pipeline, lopts);
    if (!model.ok()) return Fail(err, model.status());
    artifact.model = std::make_shared<predictor::LinearModel>(std::move(*model));
  } else if (flags.kind == "tree") {
    auto model = predictor::FitTreeEnsemble(*dataset, *pipeline, flags.tree);
    if (!model.ok()) return Fail(err, model.status());
    artifact.model =
        std::make_shared<predictor::TreeEnsembleModel>(std::move(*model));
  } else {
    const auto y = dataset->income();
    double mean = 0;
    for (const double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    artifact.model = std::make_shared<predictor::ConstantModel>(mean);
  }

  const size_t n = dataset->num_rows();
  const size_t d = dataset->num_features();
  std::vector<double> raw(n * d);
  for (size_t j = 0; j < d; ++j) {
    const auto column = dataset->column(j);
    for (size_t i = 0; i < n; ++i) raw[i * d + j] = column[i];
  }
  std::vector<double> predicted(n);
  if (auto s = predictor::PredictRawRows(*artifact.model, *pipeline, raw,
                                         predicted);
      !s.ok()) {
    return Fail(err, s);
  }
  const auto y = dataset->income();
  double mean = 0;
  for (const double v : y) mean += v;
  mean /= static_cast<double>(n);
  double sse = 0, sst = 0;
  for (size_t i = 0; i < n; ++i) {
    sse += (y[i] - predicted[i]) * (y[i] - predicted[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  const double mse = sse / static_cast<double>(n);
  const double r2 = sst > 0 ? 1.0 - sse / sst : 0.0;
  artifact.metrics = {{"rows", n}, {"mse", mse}, {"r2", r2}};
  if (auto s = predictor::SaveArtifact(artifact, flags.out); !s.ok()) {
    return Fail(err, s);
  }
  out << "model " << artifact.model->model_id() << "\n";
  out << "rows " << n << "\n";
  out << "mse " << mse << "\n";
  out << "r2 " << r2 << "\n";
  out << "wrote " << flags.out << "\n";
  return kExitOk;
}

int RunValidate(const std::string& schema_path, const std::string& data_path,
                std::ostream& out, std::ostream& err) {
  auto schema = tabular::LoadSchema(schema_path);
  if (!schema.ok()) return Fail(err, schema.status());
  auto dataset = tabular::LoadDataset(data_path, *schema);
  if (!dataset.ok()) return Fail(err, dataset.status());
  auto rules = tabular::ResolveRules(schema->conditionalities,
                                     dataset->features(),
                                     schema->missing_sentinel);
  if (!rules.ok()) return Fail(err, rules.status());

  size_t violations = 0;
  const auto analysis = tabular::AnalyzeRules(*rules, *dataset);
  for (const auto& v : analysis.violations) {
    ++violations;
    switch (v.kind) {
      case tabular::RuleViolation::Kind::kDisjointness:
        out << "disjointness violation: rule `" << v.rule << "`, feature `"
            << v.feature << "`: " << v.detail << "\n";
        break;
      case tabular::RuleViolation::Kind::kTotality:
        out << "totality violation: rule `" << v.rule << "`, feature `"
            << v.feature << "`: " << v.detail << " (" << v.rows << " rows)\n";
        break;
      case tabular::RuleViolation::Kind::kIndexOutOfRange:
        out << "index violation: rule `" << v.rule << "`: " << v.detail << "\n";
        break;
    }
  }
  for (const auto& s : analysis.empty_subsets) {
    ++violations;
    out << "empty subset: rule `" << s.rule << "`, subset " << s.subset
        << " (0 rows)\n";
  }
  for (const auto& s : analysis.subsets) {
    out << "subset: rule `" << s.rule << "`, " << s.subset << ": " << s.rows
        << " rows\n";
  }
  auto groups = groups::GroupsFromSchema(dataset->features(), schema->groups);
  if (!groups.ok()) {
    ++violations;
    out << "group partition error: " << groups.status().message() << "\n";
  }
  out << violations << " violations\n";
  return kExitOk;
}

struct ExplainFlags {
  std::string data, schema, model, household, algorithm = "contrastive";
  std::string out = "reports";
  std::string dist;
  bool build_dist = false;
  ExplainSettings settings;
  uint64_t seed = 0;
  double poverty_line = 0;
  std::string built_at;
};

int RunExplain(const ExplainFlags& flags, std::ostream& out, std::ostream& err) {
  auto algorithm = engine::ParseAlgorithm(flags.algorithm);
  if (!algorithm.ok()) return Usage(err, algorithm.status().message());
  const bool contrastive = *algorithm == engine::Algorithm::kContrastive;
  if (contrastive && flags.dist.empty() && !flags.build_dist) {
    return Usage(err, "contrastive explanations need --dist or --build-dist");
  }
  auto ids = ParseSelector(flags.household);
  if (!ids.ok()) return Fail(err, ids.status());

  ExplainSettings settings = flags.settings;
  if (flags.poverty_line > 0) settings.poverty_line = flags.poverty_line;
  auto ctx = ExplainContext::Load(flags.data, flags.schema, flags.model, settings);
  if (!ctx.ok()) return Fail(err, ctx.status());

  std::vector<size_t> rows;
  for (const auto& id : *ids) {
    const auto row = (*ctx)->dataset().RowIndexById(id);
    if (!row) {
      return Fail(err, MakeError(ErrorKind::kNotFound,
                                 absl::StrCat("unknown household `", id, "`")));
    }
    rows.push_back(*row);
  }
  if (auto s = EnsureDirectory(flags.out); !s.ok()) return Fail(err, s);

  std::optional<groups::ContrastiveDistribution> dist;
  if (flags.build_dist) {
    auto built = (*ctx)->BuildDistribution(flags.seed, flags.built_at);
    if (!built.ok()) return Fail(err, built.status());
    const std::string path = JoinPath(flags.out, "distribution.json");
    if (auto s = built->Save(path); !s.ok()) return Fail(err, s);
    out << "wrote " << path << " (" << built->num_rows() << " households)\n";
    dist = std::move(*built);
  } else if (!flags.dist.empty()) {
    auto loaded = groups::ContrastiveDistribution::Load(flags.dist);
    if (!loaded.ok()) return Fail(err, loaded.status());
    dist = std::move(*loaded);
  }
  if (contrastive) {
    const std::string expected = (*ctx)->Fingerprint(*algorithm, flags.seed);
    if (dist->fingerprint() != expected) {
      return Fail(err, MakeError(ErrorKind::kFingerprintMismatch,
                                 absl::StrCat("distribution fingerprint ",
                                              dist->fingerprint(),
                                              " does not match this run (",
                                              expected, ")")));
    }
  }

  for (size_t i = 0; i < rows.size(); ++i) {
    auto report = (*ctx)->Report(rows[i], *algorithm, flags.seed,
                                 dist ? &*dist : nullptr);
    if (!report.ok()) {
      return Fail(err, MakeError(GetErrorKind(report.status())
                                     .value_or(ErrorKind::kIo),
                                 absl::StrCat("household `", (*ids)[i], "`: ",
                                              report.status().message())));
    }
    const std::string path = JoinPath(flags.out, (*ids)[i] + ".json");
    if (auto s = WriteJson(path, *report); !s.ok()) return Fail(err, s);
    out << "wrote " << path << "\n";
  }
  return kExitOk;
}

int RunPlotdata(const std::string& data, const std::string& schema_path,
                const std::string& report_path, const std::string& dist_path,
                int bins, const std::string& out_dir, std::ostream& out,
                std::ostream& err) {
  auto schema = tabular::LoadSchema(schema_path);
  if (!schema.ok()) return Fail(err, schema.status());
  auto dataset = tabular::LoadDataset(data, *schema);
  if (!dataset.ok()) return Fail(err, dataset.status());
  auto report = ReadJson(report_path);
  if (!report.ok()) return Fail(err, report.status());
  if (auto s = EnsureDirectory(out_dir); !s.ok()) return Fail(err, s);

  HistogramMarker marker;
  try {
    marker.household_id = report->at("household_id").get<std::string>();
    marker.predicted_income = report->at("predicted_income").get<double>();
    const auto& formal = report->at("observed_formal_income");
    if (!formal.is_null()) marker.observed_formal_income = formal.get<double>();
  } catch (const json::exception& e) {
    return Fail(err, MakeError(ErrorKind::kParseError,
                               absl::StrCat(report_path, ": ", e.what())));
  }
  const std::string hist_path = JoinPath(out_dir, "histogram.json");
  if (auto s = WriteJson(hist_path, BuildHistogram(dataset->income(), bins, marker));
      !s.ok()) {
    return Fail(err, s);
  }
  out << "wrote " << hist_path << "\n";

  if (!dist_path.empty()) {
    auto dist = groups::ContrastiveDistribution::Load(dist_path);
    if (!dist.ok()) return Fail(err, dist.status());
    auto focal = GroupsFromReport(*report);
    if (!focal.ok()) return Fail(err, focal.status());
    auto radar = BuildRadar(marker.household_id, *focal, *dist);
    if (!radar.ok()) return Fail(err, radar.status());
    const std::string radar_path = JoinPath(out_dir, "radar.json");
    if (auto s = WriteJson(radar_path, *radar); !s.ok()) return Fail(err, s);
    out << "wrote " << radar_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perturbation-based explanations for income estimation models",
               "povex"};
  app.require_subcommand(1);

  size_t gen_rows = 5000;
  uint64_t gen_seed = 1;
  std::string gen_out = ".";
  auto* generate = app.add_subcommand("generate", "Write the synthetic survey");
  generate->add_option("--rows", gen_rows, "Households")->capture_default_str();
  generate->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  generate->add_option("--out-dir", gen_out, "Output directory")
      ->capture_default_str();

  TrainFlags train_flags;
  train_flags.kind = "linear";
  auto* train = app.add_subcommand("train", "Fit a reference model");
  train->add_option("--data", train_flags.data, "Dataset CSV")->required();
  train->add_option("--schema", train_flags.schema, "Schema JSON")->required();
  train->add_option("--kind", train_flags.kind, "linear, tree or constant")
      ->check(CLI::IsMember({"linear", "tree", "constant"}))
      ->capture_default_str();
  train->add_option("--out", train_flags.out, "Model artifact path")->required();
  train->add_option("--trees", train_flags.tree.trees)->capture_default_str();
  train->add_option("--depth", train_flags.tree.max_depth)->capture_default_str();
  train->add_option("--learning-rate", train_flags.tree.learning_rate)
      ->capture_default_str();
  train->add_option("--bag-fraction", train_flags.tree.bag_fraction)
      ->capture_default_str();
  train->add_option("--min-leaf", train_flags.tree.min_leaf_rows)
      ->capture_default_str();
  train->add_option("--seed", train_flags.tree.seed)->capture_default_str();
  train->add_option("--ridge", train_flags.ridge)->capture_default_str();
  train->add_flag("--no-one-hot", train_flags.no_one_hot,
                  "Feed category codes instead of indicator columns");

  std::string validate_schema, validate_data;
  auto* validate = app.add_subcommand("validate", "Check schema, rules and groups");
  validate->add_option("--schema", validate_schema)->required();
  validate->add_option("--data", validate_data)->required();

  ExplainFlags ef;
  auto* explain = app.add_subcommand("explain", "Write explanation reports");
  explain->add_option("--data", ef.data)->required();
  explain->add_option("--schema", ef.schema)->required();
  explain->add_option("--model", ef.model)->required();
  explain->add_option("--household", ef.household, "id, id,id or @file")
      ->required();
  explain->add_option("--algorithm", ef.algorithm)
      ->check(CLI::IsMember({"uni", "cond", "biv", "contrastive"}))
      ->capture_default_str();
  explain->add_option("--bins", ef.settings.bins)
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  explain->add_option("--seed", ef.seed)->capture_default_str();
  explain->add_option("--resamples", ef.settings.resamples)
      ->check(CLI::Range(1, 1 << 20))
      ->capture_default_str();
  explain->add_option("--poverty-line", ef.poverty_line, "Overrides the schema")
      ->check(CLI::PositiveNumber);
  explain->add_flag("--build-dist", ef.build_dist,
                    "Build the contrastive distribution into --out");
  explain->add_option("--dist", ef.dist, "Contrastive distribution file");
  explain->add_option("--out", ef.out)->capture_default_str();
  explain->add_option("--budget", ef.settings.budget)->capture_default_str();
  explain->add_option("--workers", ef.settings.workers)
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  explain->add_option("--built-at", ef.built_at,
                      "Timestamp recorded in a built distribution");

  std::string pd_data, pd_schema, pd_report, pd_dist, pd_out = ".";
  int pd_bins = kDefaultHistogramBins;
  auto* plotdata = app.add_subcommand("plotdata", "Write histogram and radar data");
  plotdata->add_option("--data", pd_data)->required();
  plotdata->add_option("--schema", pd_schema)->required();
  plotdata->add_option("--report", pd_report)->required();
  plotdata->add_option("--dist", pd_dist, "Contrastive distribution (radar)");
  plotdata->add_option("--bins", pd_bins)
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  plotdata->add_option("--out", pd_out)->capture_default_str();

  ServeOptions so;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--data", so.data)->required();
  serve->add_option("--schema", so.schema)->required();
  serve->add_option("--model", so.model)->required();
  serve->add_option("--dist", so.dist);
  serve->add_option("--host", so.host)->capture_default_str();
  serve->add_option("--port", so.port)->capture_default_str();
  serve->add_option("--workers", so.workers, "Concurrent explanations")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  serve->add_option("--bins", so.settings.bins)
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  serve->add_option("--resamples", so.settings.resamples)
      ->check(CLI::Range(1, 1 << 20))
      ->capture_default_str();
  serve->add_option("--seed", so.default_seed)->capture_default_str();
  serve->add_option("--budget", so.settings.budget)->capture_default_str();
  serve->add_option("--poverty-line", so.poverty_line)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (generate->parsed()) return RunGenerate(gen_rows, gen_seed, gen_out, out, err);
  if (train->parsed()) return RunTrain(train_flags, out, err);
  if (validate->parsed()) {
    return RunValidate(validate_schema, validate_data, out, err);
  }
  if (explain->parsed()) return RunExplain(ef, out, err);
  if (plotdata->parsed()) {
    return RunPlotdata(pd_data, pd_schema, pd_report, pd_dist, pd_bins, pd_out,
                       out, err);
  }
  if (serve->parsed()) {
    if (so.poverty_line > 0) so.settings.poverty_line = so.poverty_line;
    const absl::Status status = RunServe(so, out, err);
    return status.ok() ? kExitOk : Fail(err, status);
  }
  return kExitUsage;
}

}  // namespace povex::app
