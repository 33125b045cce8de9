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

// Acceptance suite: one PASS/FAIL line per criterion, all at full scale.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "absl/strings/str_cat.h"
#include "povex/engine/engine.h"
#include "povex/groups/groups.h"
#include "povex/predictor/fit.h"
#include "povex/predictor/model.h"
#include "povex/predictor/pipeline.h"
#include "povex/tabular/conditional.h"
#include "tests/support/toy.h"
#include "tools/app/commands.h"
#include "tools/app/context.h"
#include "tools/app/service.h"
#include "tools/app/synthetic.h"

namespace povex {
namespace {

using engine::Algorithm;
using engine::ExplainConfig;
using engine::ImportanceVector;
using tabular::Household;

// Tolerances.
constexpr double kLinearRelTol = 1e-9;
constexpr double kLinearSeconds = 5.0;
constexpr double kBruteForceAbsTol = 1e-12;
constexpr int kBruteForceSeeds = 100;
constexpr int kReductionConfigs = 20;
constexpr size_t kFeasibilityInstances = 10'000;
constexpr double kMaxEmptySubsetRate = 0.01;
constexpr double kAffineRelTol = 1e-10;
constexpr size_t kPercentileFocals = 1000;
constexpr double kContrastiveSeconds = 60.0;

constexpr Algorithm kAll[] = {Algorithm::kUnivariate, Algorithm::kConditional,
                              Algorithm::kBivariate, Algorithm::kContrastive};

struct Outcome {
  bool pass = true;
  std::string detail;
  int failures = 0;
  std::string first_failure;

  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first_failure = what;
    pass = false;
  }
};

template <typename T>
T Must(absl::StatusOr<T> v, const std::string& what) {
  if (!v.ok()) throw std::runtime_error(absl::StrCat(what, ": ", v.status().message()));
  return std::move(*v);
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

bool RelClose(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

bool SameBits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// The 5000-household survey shared by the criteria below.
struct Survey {
  tabular::Schema schema;
  tabular::Dataset dataset;
  std::vector<tabular::ConditionalityRule> rules;
  std::vector<groups::FeatureGroup> groups;
  predictor::PreprocessPipeline pipeline;
  std::shared_ptr<const predictor::PredictorModel> linear;
};

const Survey& GetSurvey() {
  static const Survey survey = [] {
    app::SyntheticOptions options;
    options.rows = 5000;
    options.seed = 1;
    auto s = Must(app::GenerateSynthetic(options), "generate");
    Survey out{s.schema, s.dataset, {}, {}, {}, nullptr};
    out.rules = Must(tabular::ResolveRules(s.schema.conditionalities,
                                           s.dataset.features(),
                                           s.schema.missing_sentinel),
                     "rules");
    out.groups = Must(groups::GroupsFromSchema(s.dataset.features(), s.schema.groups),
                      "groups");
    out.pipeline = Must(predictor::PreprocessPipeline::Fit(s.dataset), "pipeline");
    out.linear = std::make_shared<predictor::LinearModel>(
        Must(predictor::FitLinear(s.dataset, out.pipeline), "linear fit"));
    return out;
  }();
  return survey;
}

// 100 trees of depth 6 over the survey.
std::shared_ptr<const predictor::PredictorModel> SurveyTrees() {
  static const auto model = [] {
    predictor::TreeEnsembleParams params;
    params.trees = 100;
    params.max_depth = 6;
    params.seed = 3;
    return std::shared_ptr<const predictor::PredictorModel>(
        std::make_shared<predictor::TreeEnsembleModel>(Must(
            predictor::FitTreeEnsemble(GetSurvey().dataset, GetSurvey().pipeline, params),
            "tree fit")));
  }();
  return model;
}

tabular::PovertyConfig SurveyPoverty() {
  tabular::PovertyConfig p = GetSurvey().schema.poverty;
  return p;
}

Outcome OracleLinear() {
  Outcome o;
  const Survey& s = GetSurvey();
  const auto* linear = dynamic_cast<const predictor::LinearModel*>(s.linear.get());
  const auto& beta = linear->coefficients();
  const size_t n = s.dataset.num_rows(), width = s.pipeline.width();
  // Mean encoded row; numeric missing values encode to the imputed column mean,
  // which is the mean over observed values.
  std::vector<double> mean(width, 0.0), enc(width);
  for (size_t i = 0; i < n; ++i) {
    if (!s.pipeline.Encode(s.dataset.Row(i).values, enc).ok()) {
      throw std::runtime_error("encode");
    }
    for (size_t c = 0; c < width; ++c) mean[c] += enc[c];
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  // 128 bins keeps every distinct value of every survey column.
  const int bins = 128;
  const auto start = std::chrono::steady_clock::now();
  const auto engine = Must(engine::PerturbationEngine::Create(
                               s.dataset, s.linear, s.pipeline, {}, {bins, {}}),
                           "engine");
  for (size_t j = 0; j < s.dataset.num_features(); ++j) {
    std::set<double> distinct;
    for (const double v : s.dataset.column(j)) {
      if (!tabular::IsMissing(v)) distinct.insert(v);
    }
    o.Expect(engine.value_set(j).size() >= distinct.size(),
             absl::StrCat("feature ", j, " was binned"));
  }
  std::mt19937_64 rng(99);
  double worst = 0;
  for (int f = 0; f < 50; ++f) {
    const Household focal = s.dataset.Row(rng() % n);
    const auto iv = Must(engine.Explain(Algorithm::kUnivariate, focal, {}), "explain");
    if (!s.pipeline.Encode(focal.values, enc).ok()) throw std::runtime_error("encode");
    std::vector<double> want(s.dataset.num_features(), 0.0);
    for (size_t c = 0; c < width; ++c) {
      want[static_cast<size_t>(s.pipeline.columns()[c].source_feature)] +=
          beta[c] * (enc[c] - mean[c]);
    }
    for (size_t j = 0; j < want.size(); ++j) {
      worst = std::max(worst, std::abs(iv.values[j] - want[j]) /
                                  std::max(1.0, std::abs(want[j])));
      o.Expect(RelClose(iv.values[j], want[j], kLinearRelTol),
               absl::StrCat("focal ", focal.id, " feature ", j, ": ", iv.values[j],
                            " vs ", want[j]));
    }
  }
  const double secs = Seconds(start);
  o.Expect(secs < kLinearSeconds, absl::StrCat("took ", secs, " s"));
  o.detail = absl::StrCat("50 focals, n=", n, ", d=", s.dataset.num_features(),
                          ", max rel err ", worst, ", ", secs, " s");
  return o;
}

Household ToyFocal(const testing::ToyProblem& p, std::mt19937_64& rng) {
  if (rng() % 2 == 0) return p.dataset.Row(rng() % p.dataset.num_rows());
  Household h;
  h.id = "probe";
  for (size_t j = 0; j < p.dataset.num_features(); ++j) {
    const auto& f = p.dataset.feature(j);
    if (rng() % 8 == 0) {
      h.values.push_back(tabular::kMissing);
    } else if (f.is_discrete()) {
      h.values.push_back(static_cast<double>(rng() % f.categories.size()));
    } else {
      h.values.push_back(static_cast<double>(rng() % 12) * 0.5);
    }
  }
  return h;
}

ImportanceVector ExplainToy(const testing::ToyProblem& p, Algorithm alg,
                            const Household& focal, const ExplainConfig& config) {
  const auto engine = Must(
      engine::MakeEngine(alg, p.dataset, p.model, p.pipeline, p.rules, p.poverty, 16),
      "engine");
  return Must(engine.Explain(alg, focal, config), "explain");
}

Outcome BruteForce() {
  Outcome o;
  double worst = 0;
  int cases = 0;
  for (int seed = 0; seed < kBruteForceSeeds; ++seed) {
    testing::ToyOptions options;
    options.d = 1 + seed % 3;
    const auto p = testing::MakeToyProblem(1000 + seed, options);
    std::mt19937_64 rng(seed);
    const Household focal = ToyFocal(p, rng);
    for (const Algorithm alg : kAll) {
      for (const int r : {1, 3}) {
        ExplainConfig config;
        config.seed = static_cast<uint64_t>(seed) * 31 + 5;
        config.resamples = r;
        const auto iv = ExplainToy(p, alg, focal, config);
        const auto want = testing::OracleImportances(p, alg, focal, config.seed, r);
        ++cases;
        for (size_t j = 0; j < want.size(); ++j) {
          const double err = std::abs(iv.values[j] - want[j]);
          worst = std::max(worst, err);
          o.Expect(err <= kBruteForceAbsTol,
                   absl::StrCat(engine::AlgorithmName(alg), " seed ", seed, " j ", j,
                                " err ", err));
        }
      }
    }
  }
  o.detail = absl::StrCat(kBruteForceSeeds, " seeds, ", cases,
                          " explanations, max abs err ", worst);
  return o;
}

Outcome ReductionChain() {
  Outcome o;
  for (int c = 0; c < kReductionConfigs; ++c) {
    testing::ToyOptions options;
    const auto p = testing::MakeToyProblem(500 + c, options);
    std::mt19937_64 rng(c);
    const Household focal = ToyFocal(p, rng);
    ExplainConfig config;
    config.seed = static_cast<uint64_t>(c) * 7;
    config.resamples = 1 + c % 3;

    auto no_rules = p;
    no_rules.rules.clear();
    o.Expect(SameBits(ExplainToy(no_rules, Algorithm::kConditional, focal, config).values,
                      ExplainToy(no_rules, Algorithm::kUnivariate, focal, config).values),
             absl::StrCat("cond != uni without rules, config ", c));

    testing::ToyOptions one;
    one.d = 1;
    const auto p1 = testing::MakeToyProblem(500 + c, one);
    const Household f1 = ToyFocal(p1, rng);
    o.Expect(SameBits(ExplainToy(p1, Algorithm::kBivariate, f1, config).values,
                      ExplainToy(p1, Algorithm::kConditional, f1, config).values),
             absl::StrCat("biv != cond at d=1, config ", c));

    auto rich = p;
    const auto y = p.dataset.income();
    rich.poverty.poverty_line = *std::max_element(y.begin(), y.end()) + 1;
    o.Expect(SameBits(ExplainToy(rich, Algorithm::kContrastive, focal, config).values,
                      ExplainToy(rich, Algorithm::kBivariate, focal, config).values),
             absl::StrCat("contrastive != biv above max income, config ", c));
  }
  o.detail = absl::StrCat(kReductionConfigs, " configs per link, bitwise equality");
  return o;
}

Outcome Feasibility() {
  Outcome o;
  const Survey& s = GetSurvey();
  const auto& rules = s.rules;
  const auto& ds = s.dataset;
  // Observed dependent values per (rule, subset, dependent). Numeric
  // dependents are never drawn missing.
  std::map<std::tuple<size_t, size_t, size_t>, std::set<double>> support;
  std::map<std::pair<size_t, size_t>, size_t> subset_rows;
  std::vector<double> row(ds.num_features());
  for (size_t i = 0; i < ds.num_rows(); ++i) {
    for (size_t j = 0; j < ds.num_features(); ++j) row[j] = ds.value(i, j);
    for (size_t r = 0; r < rules.size(); ++r) {
      const auto subset = rules[r].SubsetOf(row);
      if (!subset) continue;
      ++subset_rows[{r, *subset}];
      for (const size_t f : rules[r].dependents) {
        if (tabular::IsMissing(row[f]) && !ds.feature(f).is_discrete()) continue;
        support[{r, *subset, f}].insert(row[f]);
      }
    }
  }
  const auto contains = [&](size_t r, size_t subset, size_t f, double v) {
    const auto it = support.find({r, subset, f});
    if (it == support.end()) return false;
    if (tabular::IsMissing(v)) {
      return std::any_of(it->second.begin(), it->second.end(),
                         [](double x) { return tabular::IsMissing(x); });
    }
    return it->second.count(v) > 0;
  };

  size_t instances = 0, draws = 0, violations = 0, empty = 0, unmapped = 0;
  const auto engine = Must(engine::PerturbationEngine::Create(
                               ds, s.linear, s.pipeline, rules, {16, {}}),
                           "engine");
  ExplainConfig config;
  config.resamples = 4;
  config.observer = [&](const engine::PerturbationRecord& record,
                        std::span<const double> values,
                        const tabular::ResampleTrace& trace) {
    if (trace.triggered_rules.empty() || record.self) return;
    if (instances >= kFeasibilityInstances) return;
    ++instances;
    for (const size_t r : trace.triggered_rules) {
      const auto subset = rules[r].SubsetOf(values);
      for (const size_t f : rules[r].dependents) {
        ++draws;
        bool fallback = false;
        for (const auto& w : trace.warnings) {
          if (w.rule != r || w.feature != f) continue;
          fallback = true;
          if (w.code == tabular::ResampleWarning::Code::kEmptySubset) {
            ++empty;
          } else {
            ++unmapped;
          }
        }
        if (fallback) continue;
        if (!subset || !contains(r, *subset, f, values[f])) ++violations;
      }
    }
  };
  for (size_t i = 0; i < ds.num_rows() && instances < kFeasibilityInstances; ++i) {
    config.seed = i;
    Must(engine.Explain(Algorithm::kConditional, ds.Row(i), config), "explain");
  }
  size_t populated = 0;
  for (const auto& [key, rows] : subset_rows) populated += rows > 0;
  const double rate = draws ? static_cast<double>(empty) / draws : 1.0;
  o.Expect(instances == kFeasibilityInstances,
           absl::StrCat("only ", instances, " triggered instances"));
  o.Expect(violations == 0, absl::StrCat(violations, " infeasible dependents"));
  o.Expect(rate < kMaxEmptySubsetRate, absl::StrCat("empty-subset rate ", rate));
  o.detail = absl::StrCat(instances, " instances, ", draws, " dependent draws, ",
                          violations, " violations, empty-subset fallbacks ", empty,
                          " (", 100.0 * rate, "%), unmapped ", unmapped, ", ",
                          populated, " populated subsets");
  return o;
}

Outcome Affine() {
  Outcome o;
  const Survey& s = GetSurvey();
  const auto trees = SurveyTrees();
  const auto poverty = SurveyPoverty();
  double worst = 0;
  for (const Algorithm alg : kAll) {
    const auto base = Must(engine::MakeEngine(alg, s.dataset, trees, s.pipeline,
                                              s.rules, poverty, 16),
                           "engine");
    for (const auto [a, b] : {std::pair{2.0, 0.0}, {0.5, 100.0}, {10.0, -3.0}}) {
      const auto scaled_model = std::make_shared<predictor::AffineModel>(trees, a, b);
      const auto scaled = Must(engine::MakeEngine(alg, s.dataset, scaled_model,
                                                  s.pipeline, s.rules, poverty, 16),
                               "engine");
      for (size_t f = 0; f < 5; ++f) {
        ExplainConfig config;
        config.seed = f;
        config.resamples = 2;
        const Household focal = s.dataset.Row(f * 997);
        const auto x = Must(base.Explain(alg, focal, config), "explain");
        const auto y = Must(scaled.Explain(alg, focal, config), "explain");
        for (size_t j = 0; j < x.values.size(); ++j) {
          const double want = a * x.values[j];
          worst = std::max(worst, std::abs(y.values[j] - want) /
                                      std::max(1.0, std::abs(want)));
          o.Expect(RelClose(y.values[j], want, kAffineRelTol),
                   absl::StrCat(engine::AlgorithmName(alg), " a=", a, " b=", b,
                                " j=", j));
        }
      }
    }
  }
  o.detail = absl::StrCat("4 algorithms x 3 maps x 5 focals, max rel err ", worst);
  return o;
}

groups::ContrastiveDistribution TieDistribution(std::vector<double> column) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> ids;
  for (size_t i = 0; i < column.size(); ++i) {
    rows.push_back({column[i]});
    ids.push_back(absl::StrCat("h", i));
  }
  return Must(groups::ContrastiveDistribution::Create("fp", {{"g", "G"}}, ids, rows,
                                                      "t"),
              "distribution");
}

Outcome GroupsAndPercentiles() {
  Outcome o;
  // Hand-computed mid-rank cases.
  const auto d = TieDistribution({1, 2, 2, 2, 5});
  const std::pair<double, double> cases[] = {{0, 0},  {1, 10},  {2, 50},
                                             {3, 80}, {5, 90},  {6, 100}};
  for (const auto& [x, want] : cases) {
    o.Expect(d.Percentile(0, x) == want,
             absl::StrCat("percentile of ", x, " = ", d.Percentile(0, x)));
  }
  o.Expect(TieDistribution({7, 7, 7, 7}).Percentile(0, 7) == 50, "all-tie case");
  o.Expect(TieDistribution({4, 1, 3, 2}).Median(0) == 2.5, "even median");

  const Survey& s = GetSurvey();
  const auto poverty = SurveyPoverty();
  groups::DistributionOptions dopts;
  dopts.explain.seed = 0;
  dopts.explain.budget = 1ull << 40;
  dopts.built_at = "t";
  const auto dist = Must(groups::BuildContrastiveDistribution(
                             s.dataset, s.linear, s.pipeline, s.rules, poverty,
                             s.groups, dopts),
                         "distribution");
  const auto engine = Must(engine::MakeEngine(Algorithm::kContrastive, s.dataset,
                                              s.linear, s.pipeline, s.rules, poverty,
                                              16),
                           "engine");
  const size_t p = s.groups.size();
  std::vector<std::vector<std::pair<double, double>>> points(p);
  std::mt19937_64 rng(5);
  for (size_t f = 0; f < kPercentileFocals; ++f) {
    const Household focal = s.dataset.Row(rng() % s.dataset.num_rows());
    ExplainConfig config;
    const auto iv = Must(engine.Explain(Algorithm::kContrastive, focal, config),
                         "explain");
    const auto g = Must(groups::GroupImportances(iv, s.groups), "groups");
    for (size_t k = 0; k < p; ++k) {
      double sum = 0;
      for (const size_t j : s.groups[k].members) sum += iv.values[j];
      o.Expect(g.values[k] == sum / static_cast<double>(s.groups[k].cardinality()),
               absl::StrCat("group ", k, " is not the member mean"));
    }
    const auto pct = Must(groups::PercentileContrast(g, dist), "percentiles");
    for (size_t k = 0; k < p; ++k) {
      double below = 0, equal = 0;
      for (const auto& r : dist.rows()) {
        below += r[k] < g.values[k];
        equal += r[k] == g.values[k];
      }
      const double want = 100.0 * (below + 0.5 * equal) / dist.num_rows();
      o.Expect(std::abs(pct[k] - want) <= 1e-12 * 100,
               absl::StrCat("percentile ", pct[k], " vs mid-rank ", want));
      points[k].push_back({g.values[k], pct[k]});
    }
  }
  for (size_t k = 0; k < p; ++k) {
    std::sort(points[k].begin(), points[k].end());
    for (size_t i = 0; i < points[k].size(); ++i) {
      o.Expect(points[k][i].second >= 0 && points[k][i].second <= 100, "bounds");
      if (i > 0) {
        o.Expect(points[k][i].second >= points[k][i - 1].second,
                 absl::StrCat("group ", k, " not monotone"));
      }
    }
  }
  o.detail = absl::StrCat(kPercentileFocals, " focals x ", p, " groups against ",
                          dist.num_rows(), " contrast households; tie cases exact");
  return o;
}

Outcome DeterminismAndPerformance() {
  Outcome o;
  const Survey& s = GetSurvey();
  const auto trees = SurveyTrees();
  const auto poverty = SurveyPoverty();
  const Household focal = s.dataset.Row(17);
  ExplainConfig config;
  config.seed = 8;
  config.resamples = 1;
  config.workers = 1;
  const auto start = std::chrono::steady_clock::now();
  const auto engine = Must(engine::MakeEngine(Algorithm::kContrastive, s.dataset, trees,
                                              s.pipeline, s.rules, poverty, 16),
                           "engine");
  const auto serial = Must(engine.Explain(Algorithm::kContrastive, focal, config),
                           "explain");
  const double secs = Seconds(start);
  config.workers = 8;
  const auto parallel = Must(engine.Explain(Algorithm::kContrastive, focal, config),
                             "explain");
  o.Expect(secs < kContrastiveSeconds, absl::StrCat("took ", secs, " s"));
  o.Expect(SameBits(serial.values, parallel.values), "values differ across workers");
  o.Expect(serial.evaluations == parallel.evaluations, "evaluation counts differ");
  o.Expect(serial.fingerprint == parallel.fingerprint, "fingerprints differ");
  o.detail = absl::StrCat("d=", s.dataset.num_features(), ", 100 trees depth 6, ",
                          serial.evaluations, " evaluations in ", secs,
                          " s; 1 vs 8 workers bit-identical: ",
                          SameBits(serial.values, parallel.values) ? "yes" : "no");
  return o;
}

int Cli(std::vector<std::string> args, std::string* err) {
  args.insert(args.begin(), "povex");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::ostringstream out, e;
  const int code = app::RunCli(static_cast<int>(args.size()), argv.data(), out, e);
  *err = e.str();
  return code;
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome CliServiceParity() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       absl::StrCat("povex_acceptance_", ::getpid());
  fs::remove_all(dir);
  std::string err;
  const auto need = [&](int code, const std::string& what) {
    if (code != 0) throw std::runtime_error(absl::StrCat(what, ": ", err));
  };
  const std::string d = dir.string();
  need(Cli({"generate", "--rows", "1500", "--seed", "4", "--out-dir", d}, &err),
       "generate");
  const std::string data = d + "/survey.csv", schema = d + "/schema.json",
                    model = d + "/model.json";
  need(Cli({"train", "--data", data, "--schema", schema, "--kind", "tree",
            "--trees", "30", "--depth", "4", "--out", model},
           &err),
       "train");
  const std::string ids = "H00001,H00002,H00777";
  for (const std::string alg : {"uni", "cond", "biv", "contrastive"}) {
    std::vector<std::string> args = {"explain",  "--data",      data, "--schema",
                                     schema,     "--model",     model, "--household",
                                     ids,        "--algorithm", alg,  "--seed",
                                     "5",        "--resamples", "2",  "--out",
                                     d + "/" + alg};
    if (alg == "contrastive") {
      args.insert(args.end(), {"--build-dist", "--built-at", "t"});
    }
    need(Cli(args, &err), "explain " + alg);
  }
  app::ExplainSettings settings;
  settings.resamples = 2;
  std::shared_ptr<const app::ExplainContext> ctx =
      Must(app::ExplainContext::Load(data, schema, model, settings), "context");
  auto dist = Must(groups::ContrastiveDistribution::Load(d + "/contrastive/distribution.json"),
                   "distribution");
  app::ExplainService::Config config;
  config.default_seed = 5;
  const auto svc = Must(app::ExplainService::Create(ctx, std::move(dist), config),
                        "service");
  int compared = 0;
  for (const std::string alg : {"uni", "cond", "biv", "contrastive"}) {
    for (const std::string id : {"H00001", "H00002", "H00777"}) {
      const auto resp = svc->Explain(absl::StrCat(R"({"household_id":")", id,
                                                  R"(","algorithm":")", alg, R"("})"));
      const std::string cli = Slurp(dir / alg / (id + ".json"));
      o.Expect(resp.status == 200, absl::StrCat(alg, " ", id, ": HTTP ", resp.status));
      o.Expect(!cli.empty() && resp.body == cli,
               absl::StrCat(alg, " ", id, ": bytes differ"));
      ++compared;
    }
  }
  fs::remove_all(dir);
  o.detail = absl::StrCat(compared, " reports (4 algorithms x 3 households) compared");
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace povex

int main() {
  using povex::Criterion;
  const Criterion criteria[] = {
      {"oracle_linear", povex::OracleLinear},
      {"brute_force", povex::BruteForce},
      {"reduction_chain", povex::ReductionChain},
      {"feasibility_fuzz", povex::Feasibility},
      {"affine_equivariance", povex::Affine},
      {"group_percentile", povex::GroupsAndPercentiles},
      {"determinism_performance", povex::DeterminismAndPerformance},
      {"cli_service_parity", povex::CliServiceParity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    povex::Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = e.what();
    }
    const double secs = povex::Seconds(start);
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail;
    if (o.failures > 0) {
      std::cout << " [" << o.failures << " failed checks, first: " << o.first_failure
                << "]";
    }
    std::cout << " (" << secs << " s)" << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
