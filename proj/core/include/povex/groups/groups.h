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

#ifndef POVEX_GROUPS_GROUPS_H_
#define POVEX_GROUPS_GROUPS_H_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "povex/engine/engine.h"
#include "povex/predictor/model.h"
#include "povex/predictor/pipeline.h"
#include "povex/tabular/conditional.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"

namespace povex::groups {

struct FeatureGroup {
  std::string id;
  std::string label;
  std::vector<size_t> members;  // ascending feature indices

  size_t cardinality() const { return members.size(); }
};

// Groups in declaration order. PartitionError when a declared group has no
// member or a feature names an undeclared group.
absl::StatusOr<std::vector<FeatureGroup>> GroupsFromSchema(
    const std::vector<tabular::FeatureSchema>& features,
    const std::vector<tabular::FeatureGroupDecl>& declared);

// Disjoint, exhaustive over [0, d), no empty group.
absl::Status ValidatePartition(const std::vector<FeatureGroup>& groups,
                               size_t d);

struct GroupImportanceVector {
  std::vector<double> values;
  std::string household_id;
  std::string fingerprint;
};

// Mean of member importances per group.
absl::StatusOr<GroupImportanceVector> GroupImportances(
    const engine::ImportanceVector& importances,
    const std::vector<FeatureGroup>& groups);
absl::StatusOr<std::vector<double>> GroupMeans(
    const std::vector<double>& importances,
    const std::vector<FeatureGroup>& groups);

// Group importances of every household of the contrast set, with per-group
// sorted copies for rank lookups.
class ContrastiveDistribution {
 public:
  struct GroupInfo {
    std::string id;
    std::string label;
  };

  // Every row must have one value per group.
  static absl::StatusOr<ContrastiveDistribution> Create(
      std::string fingerprint, std::vector<GroupInfo> groups,
      std::vector<std::string> household_ids,
      std::vector<std::vector<double>> rows, std::string built_at,
      nlohmann::json config = nlohmann::json::object());

  const std::string& fingerprint() const { return fingerprint_; }
  const std::vector<GroupInfo>& groups() const { return groups_; }
  const std::vector<std::string>& household_ids() const { return ids_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& sorted(size_t group) const { return sorted_[group]; }
  const std::string& built_at() const { return built_at_; }
  const nlohmann::json& config() const { return config_; }
  size_t num_rows() const { return rows_.size(); }
  size_t num_groups() const { return groups_.size(); }

  // 100 * (count(< x) + 0.5 * count(== x)) / m.
  double Percentile(size_t group, double x) const;
  // Middle element, or mean of the two middle elements.
  double Median(size_t group) const;

  // {"distribution_version": 1, fingerprint, groups, households, rows,
  //  built_at, config}
  nlohmann::json ToJson() const;
  static absl::StatusOr<ContrastiveDistribution> FromJson(
      const nlohmann::json& json);
  absl::Status Save(const std::string& path) const;
  static absl::StatusOr<ContrastiveDistribution> Load(const std::string& path);

 private:
  ContrastiveDistribution() = default;

  std::string fingerprint_;
  std::vector<GroupInfo> groups_;
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<double>> sorted_;
  std::string built_at_;
  nlohmann::json config_;
};

struct DistributionOptions {
  int max_bins = tabular::kDefaultMaxBins;
  engine::ExplainConfig explain;  // budget covers all m explanations
  std::string built_at;           // empty: current UTC time
};

// Runs the contrastive explanation for every household below the poverty
// line and averages each over the groups.
absl::StatusOr<ContrastiveDistribution> BuildContrastiveDistribution(
    const tabular::Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const std::vector<tabular::ConditionalityRule>& rules,
    const tabular::PovertyConfig& poverty,
    const std::vector<FeatureGroup>& groups, const DistributionOptions& options);

// Per-group mid-rank percentile of the focal's group importances.
// FingerprintMismatch when built under another configuration.
absl::StatusOr<std::vector<double>> PercentileContrast(
    const GroupImportanceVector& focal, const ContrastiveDistribution& dist);

std::string UtcTimestamp();

}  // namespace povex::groups

#endif  // POVEX_GROUPS_GROUPS_H_
