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

#ifndef POVEX_ENGINE_ENGINE_H_
#define POVEX_ENGINE_ENGINE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "povex/predictor/model.h"
#include "povex/predictor/pipeline.h"
#include "povex/tabular/conditional.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"
#include "povex/tabular/value_set.h"

namespace povex::engine {

inline constexpr uint64_t kDefaultBudget = 5'000'000;

enum class Algorithm { kUnivariate, kConditional, kBivariate, kContrastive };

// "univariate", "conditional", "bivariate", "contrastive".
absl::string_view AlgorithmName(Algorithm algorithm);
// Accepts the names above and the short forms uni, cond, biv.
absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name);

// One artificial instance. For univariate work first == second. Indices refer
// to the value sets of the reference data. `self` marks the record whose
// replacements all equal the focal's own (binned) values.
struct PerturbationRecord {
  size_t first = 0;
  size_t second = 0;
  size_t first_index = 0;
  size_t second_index = 0;
  double first_value = 0;
  double second_value = 0;
  int resample = 0;
  double weight = 0;
  double delta = 0;
  bool self = false;
};

// Sees each artificial instance after it was evaluated. May be called from
// several workers at once.
using InstanceObserver =
    std::function<void(const PerturbationRecord& record,
                       std::span<const double> values,
                       const tabular::ResampleTrace& trace)>;

struct ExplainConfig {
  uint64_t seed = 0;
  int resamples = 1;
  uint64_t budget = kDefaultBudget;
  int workers = 1;
  // Dataset and model provenance mixed into the fingerprint.
  std::string context;
  InstanceObserver observer;
};

struct EngineWarning {
  std::string code;  // EMPTY_SUBSET, UNMAPPED_DRIVER
  std::string rule;
  size_t feature = 0;
  std::string feature_name;
  uint64_t count = 0;
};

struct ImportanceVector {
  std::vector<double> values;
  std::string focal_id;
  Algorithm algorithm = Algorithm::kUnivariate;
  std::string fingerprint;
  double predicted_income = 0;
  uint64_t evaluations = 0;
  std::vector<EngineWarning> warnings;

  int max_bins = 0;
  uint64_t seed = 0;
  int resamples = 1;
  std::optional<double> poverty_line;
};

// Hex digest over (context, algorithm, bins, seed, resamples, poverty line).
std::string ConfigFingerprint(absl::string_view context, Algorithm algorithm,
                              int max_bins, uint64_t seed, int resamples,
                              std::optional<double> poverty_line);

// Precomputed value sets, joint value sets and conditional distributions of
// one reference table, bound to a model and pipeline. Immutable once built;
// Explain may be called concurrently.
class PerturbationEngine {
 public:
  struct Options {
    int max_bins = tabular::kDefaultMaxBins;
    // Set when the reference is the contrast set; enables kContrastive.
    std::optional<double> poverty_line;
  };

  static absl::StatusOr<PerturbationEngine> Create(
      const tabular::Dataset& reference,
      std::shared_ptr<const predictor::PredictorModel> model,
      const predictor::PreprocessPipeline& pipeline,
      std::vector<tabular::ConditionalityRule> rules, Options options);

  absl::StatusOr<ImportanceVector> Explain(Algorithm algorithm,
                                           const tabular::Household& focal,
                                           const ExplainConfig& config) const;

  // Model evaluations an explanation may need, independent of the focal.
  uint64_t EstimateEvaluations(Algorithm algorithm, int resamples) const;

  size_t num_features() const { return marginals_.size(); }
  const tabular::ValueSet& value_set(size_t j) const { return marginals_[j]; }
  // j != k; the pair is returned with its first feature = min(j, k).
  const tabular::JointValueSet& joint_value_set(size_t j, size_t k) const;
  const tabular::ConditionalSampler& sampler() const { return *sampler_; }
  const Options& options() const { return options_; }

 private:
  struct Entry {
    size_t first_index;
    size_t second_index;
    double weight;
  };
  struct WorkItem {
    size_t first;
    size_t second;
    std::span<const Entry> entries;
  };
  struct ItemResult {
    double sum = 0;
    uint64_t evaluations = 0;
    std::vector<tabular::ResampleWarning> warnings;
  };

  PerturbationEngine() = default;

  size_t PairSlot(size_t j, size_t k) const;
  absl::Status EvaluateItem(const WorkItem& item,
                            std::span<const double> focal, double predicted,
                            std::span<const std::optional<size_t>> own,
                            bool conditional, const ExplainConfig& config,
                            ItemResult* result) const;

  std::vector<std::string> feature_names_;
  std::shared_ptr<const predictor::PredictorModel> model_;
  predictor::PreprocessPipeline pipeline_;
  std::shared_ptr<const tabular::ConditionalSampler> sampler_;
  Options options_;
  std::vector<tabular::ValueSet> marginals_;
  std::vector<tabular::JointValueSet> joints_;  // upper triangle, row-major
  std::vector<std::vector<Entry>> diagonal_entries_;
  std::vector<std::vector<Entry>> pair_entries_;
};

// Free-standing forms. Each builds an engine over its reference table.
absl::StatusOr<ImportanceVector> UnivariateImportances(
    const tabular::Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const tabular::Household& focal, int max_bins,
    const ExplainConfig& config = {});

absl::StatusOr<ImportanceVector> ConditionalUnivariateImportances(
    const tabular::Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const tabular::Household& focal,
    const std::vector<tabular::ConditionalityRule>& rules, int max_bins,
    const ExplainConfig& config = {});

absl::StatusOr<ImportanceVector> BivariateImportances(
    const tabular::Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const tabular::Household& focal,
    const std::vector<tabular::ConditionalityRule>& rules, int max_bins,
    const ExplainConfig& config = {});

// Value sets, joint weights and conditional distributions all come from the
// rows below the poverty line.
absl::StatusOr<ImportanceVector> ContrastiveImportances(
    const tabular::Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const tabular::Household& focal,
    const std::vector<tabular::ConditionalityRule>& rules,
    const tabular::PovertyConfig& poverty, int max_bins,
    const ExplainConfig& config = {});

// Builds the engine for `algorithm` over the right reference table.
absl::StatusOr<PerturbationEngine> MakeEngine(
    Algorithm algorithm, const tabular::Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const std::vector<tabular::ConditionalityRule>& rules,
    const tabular::PovertyConfig& poverty, int max_bins);

}  // namespace povex::engine

#endif  // POVEX_ENGINE_ENGINE_H_
