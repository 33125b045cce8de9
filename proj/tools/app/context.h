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

#ifndef POVEX_TOOLS_APP_CONTEXT_H_
#define POVEX_TOOLS_APP_CONTEXT_H_

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "povex/engine/engine.h"
#include "povex/groups/groups.h"
#include "povex/predictor/artifact.h"
#include "povex/tabular/conditional.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"
#include "tools/app/report.h"

namespace povex::app {

struct ExplainSettings {
  int bins = tabular::kDefaultMaxBins;
  int resamples = 1;
  uint64_t budget = engine::kDefaultBudget;
  int workers = 1;
  std::optional<double> poverty_line;  // overrides the schema
};

// Dataset, schema, rules, groups and model loaded once; engines built on first
// use per algorithm. Thread-safe.
class ExplainContext {
 public:
  static absl::StatusOr<std::unique_ptr<ExplainContext>> Load(
      const std::string& data_path, const std::string& schema_path,
      const std::string& model_path, const ExplainSettings& settings);

  static absl::StatusOr<std::unique_ptr<ExplainContext>> Create(
      tabular::Schema schema, tabular::Dataset dataset,
      predictor::ModelArtifact artifact, const ExplainSettings& settings);

  const tabular::Schema& schema() const { return schema_; }
  const tabular::Dataset& dataset() const { return *dataset_; }
  const std::vector<tabular::ConditionalityRule>& rules() const { return rules_; }
  const std::vector<groups::FeatureGroup>& groups() const { return groups_; }
  const predictor::ModelArtifact& artifact() const { return artifact_; }
  const ExplainSettings& settings() const { return settings_; }
  const tabular::PovertyConfig& poverty() const { return poverty_; }
  const ReportProvenance& provenance() const { return provenance_; }
  // Mixed into every fingerprint.
  const std::string& context_tag() const { return context_tag_; }

  std::string Fingerprint(engine::Algorithm algorithm, uint64_t seed) const;

  absl::StatusOr<const engine::PerturbationEngine*> Engine(
      engine::Algorithm algorithm) const;

  absl::StatusOr<engine::ImportanceVector> Explain(
      size_t row, engine::Algorithm algorithm, uint64_t seed) const;

  // Contrastive reports need `distribution`; it is ignored otherwise.
  absl::StatusOr<nlohmann::json> Report(
      size_t row, engine::Algorithm algorithm, uint64_t seed,
      const groups::ContrastiveDistribution* distribution) const;

  absl::StatusOr<groups::ContrastiveDistribution> BuildDistribution(
      uint64_t seed, const std::string& built_at) const;

  // Model predictions for every dataset row.
  absl::StatusOr<std::vector<double>> PredictAll() const;

 private:
  ExplainContext() = default;

  tabular::Schema schema_;
  std::optional<tabular::Dataset> dataset_;
  std::vector<tabular::ConditionalityRule> rules_;
  std::vector<groups::FeatureGroup> groups_;
  predictor::ModelArtifact artifact_;
  ExplainSettings settings_;
  tabular::PovertyConfig poverty_;
  ReportProvenance provenance_;
  std::string context_tag_;

  struct Slot {
    std::once_flag once;
    absl::StatusOr<engine::PerturbationEngine> engine =
        absl::UnknownError("not built");
  };
  mutable std::array<Slot, 4> engines_;
};

}  // namespace povex::app

#endif  // POVEX_TOOLS_APP_CONTEXT_H_
