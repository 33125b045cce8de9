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

#include "povex/groups/groups.h"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>

#include "absl/strings/str_cat.h"
#include "povex/engine/parallel.h"
#include "povex/predictor/artifact.h"
#include "povex/status.h"
#include "povex/tabular/contrastive.h"

namespace povex::groups {

using nlohmann::json;

absl::StatusOr<std::vector<FeatureGroup>> GroupsFromSchema(
    const std::vector<tabular::FeatureSchema>& features,
    const std::vector<tabular::FeatureGroupDecl>& declared) {
  std::vector<FeatureGroup> groups;
  std::map<std::string, size_t> index;
  for (const auto& decl : declared) {
    if (!index.emplace(decl.id, groups.size()).second) {
      return MakeError(ErrorKind::kPartitionError,
                       absl::StrCat("group `", decl.id, "` declared twice"));
    }
    groups.push_back({decl.id, decl.label.empty() ? decl.id : decl.label, {}});
  }
  for (size_t j = 0; j < features.size(); ++j) {
    const auto it = index.find(features[j].group_id);
    if (it == index.end()) {
      return MakeError(ErrorKind::kPartitionError,
                       absl::StrCat("feature `", features[j].name,
                                    "` belongs to undeclared group `",
                                    features[j].group_id, "`"));
    }
    groups[it->second].members.push_back(j);
  }
  POVEX_RETURN_IF_ERROR(ValidatePartition(groups, features.size()));
  return groups;
}

absl::Status ValidatePartition(const std::vector<FeatureGroup>& groups,
                               size_t d) {
  std::vector<int> owner(d, -1);
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].members.empty()) {
      return MakeError(ErrorKind::kPartitionError,
                       absl::StrCat("group `", groups[g].id, "` is empty"));
    }
    for (const size_t j : groups[g].members) {
      if (j >= d) {
        return MakeError(ErrorKind::kPartitionError,
                         absl::StrCat("group `", groups[g].id,
                                      "` references feature ", j, " of ", d));
      }
      if (owner[j] >= 0) {
        return MakeError(ErrorKind::kPartitionError,
                         absl::StrCat("feature ", j, " is in groups `",
                                      groups[owner[j]].id, "` and `",
                                      groups[g].id, "`"));
      }
      owner[j] = static_cast<int>(g);
    }
  }
  for (size_t j = 0; j < d; ++j) {
    if (owner[j] < 0) {
      return MakeError(ErrorKind::kPartitionError,
                       absl::StrCat("feature ", j, " is in no group"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> GroupMeans(
    const std::vector<double>& importances,
    const std::vector<FeatureGroup>& groups) {
  POVEX_RETURN_IF_ERROR(ValidatePartition(groups, importances.size()));
  std::vector<double> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    double sum = 0;
    for (const size_t j : g.members) sum += importances[j];
    out.push_back(sum / static_cast<double>(g.cardinality()));
  }
  return out;
}

absl::StatusOr<GroupImportanceVector> GroupImportances(
    const engine::ImportanceVector& importances,
    const std::vector<FeatureGroup>& groups) {
  GroupImportanceVector out;
  POVEX_ASSIGN_OR_RETURN(out.values, GroupMeans(importances.values, groups));
  out.household_id = importances.focal_id;
  out.fingerprint = importances.fingerprint;
  return out;
}

absl::StatusOr<ContrastiveDistribution> ContrastiveDistribution::Create(
    std::string fingerprint, std::vector<GroupInfo> groups,
    std::vector<std::string> household_ids,
    std::vector<std::vector<double>> rows, std::string built_at,
    nlohmann::json config) {
  if (rows.empty()) {
    return MakeError(ErrorKind::kContrastiveSetTooSmall,
                     "contrastive distribution has no rows");
  }
  if (household_ids.size() != rows.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "one household id per distribution row is required");
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != groups.size()) {
      return MakeError(ErrorKind::kLengthMismatch,
                       absl::StrCat("distribution row ", i, " has ",
                                    rows[i].size(), " values for ",
                                    groups.size(), " groups"));
    }
    for (const double v : rows[i]) {
      if (!std::isfinite(v)) {
        return MakeError(ErrorKind::kInvalidArgument,
                         absl::StrCat("distribution row ", i, " is not finite"));
      }
    }
  }
  ContrastiveDistribution dist;
  dist.fingerprint_ = std::move(fingerprint);
  dist.groups_ = std::move(groups);
  dist.ids_ = std::move(household_ids);
  dist.rows_ = std::move(rows);
  dist.built_at_ = std::move(built_at);
  dist.config_ = std::move(config);
  dist.sorted_.assign(dist.groups_.size(), {});
  for (size_t g = 0; g < dist.groups_.size(); ++g) {
    auto& column = dist.sorted_[g];
    column.reserve(dist.rows_.size());
    for (const auto& row : dist.rows_) column.push_back(row[g]);
    std::sort(column.begin(), column.end());
  }
  return dist;
}

double ContrastiveDistribution::Percentile(size_t group, double x) const {
  const auto& column = sorted_[group];
  const auto lo = std::lower_bound(column.begin(), column.end(), x);
  const auto hi = std::upper_bound(lo, column.end(), x);
  const double below = static_cast<double>(lo - column.begin());
  const double equal = static_cast<double>(hi - lo);
  return 100.0 * (below + 0.5 * equal) / static_cast<double>(column.size());
}

double ContrastiveDistribution::Median(size_t group) const {
  const auto& column = sorted_[group];
  const size_t m = column.size();
  if (m % 2 == 1) return column[m / 2];
  return 0.5 * (column[m / 2 - 1] + column[m / 2]);
}

json ContrastiveDistribution::ToJson() const {
  json groups = json::array();
  for (const auto& g : groups_) groups.push_back({{"id", g.id}, {"label", g.label}});
  return json{{"distribution_version", 1},
              {"fingerprint", fingerprint_},
              {"groups", groups},
              {"households", ids_},
              {"rows", rows_},
              {"built_at", built_at_},
              {"config", config_}};
}

absl::StatusOr<ContrastiveDistribution> ContrastiveDistribution::FromJson(
    const json& root) {
  try {
    if (root.value("distribution_version", 0) != 1) {
      return MakeError(ErrorKind::kParseError,
                       "unsupported distribution_version");
    }
    std::vector<GroupInfo> groups;
    for (const auto& g : root.at("groups")) {
      groups.push_back({g.at("id").get<std::string>(),
                        g.value("label", g.at("id").get<std::string>())});
    }
    auto rows = root.at("rows").get<std::vector<std::vector<double>>>();
    std::vector<std::string> ids;
    if (root.contains("households")) {
      ids = root.at("households").get<std::vector<std::string>>();
    } else {
      for (size_t i = 0; i < rows.size(); ++i) ids.push_back(absl::StrCat(i));
    }
    return Create(root.at("fingerprint").get<std::string>(), std::move(groups),
                  std::move(ids), std::move(rows),
                  root.value("built_at", std::string()),
                  root.value("config", json::object()));
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat("distribution: ", e.what()));
  }
}

absl::Status ContrastiveDistribution::Save(const std::string& path) const {
  return predictor::WriteFileAtomically(path, ToJson().dump(2) + "\n");
}

absl::StatusOr<ContrastiveDistribution> ContrastiveDistribution::Load(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot open distribution file ", path));
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kParseError, absl::StrCat(path, ": ", e.what()));
  }
  return FromJson(root);
}

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

absl::StatusOr<ContrastiveDistribution> BuildContrastiveDistribution(
    const tabular::Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const std::vector<tabular::ConditionalityRule>& rules,
    const tabular::PovertyConfig& poverty,
    const std::vector<FeatureGroup>& groups, const DistributionOptions& options) {
  POVEX_RETURN_IF_ERROR(ValidatePartition(groups, dataset.num_features()));
  POVEX_ASSIGN_OR_RETURN(auto contrast,
                         tabular::FilterContrastive(dataset, poverty));
  engine::PerturbationEngine::Options engine_options;
  engine_options.max_bins = options.max_bins;
  engine_options.poverty_line = poverty.poverty_line;
  POVEX_ASSIGN_OR_RETURN(
      auto engine, engine::PerturbationEngine::Create(
                       contrast.rows, std::move(model), pipeline, rules,
                       engine_options));

  const engine::ExplainConfig& base = options.explain;
  const uint64_t m = contrast.cardinality();
  const uint64_t per = engine.EstimateEvaluations(
      engine::Algorithm::kContrastive, base.resamples);
  if (per != 0 && m > base.budget / per) {
    return MakeError(ErrorKind::kBudgetExceeded,
                     absl::StrCat("contrastive distribution needs ", m, " x ",
                                  per, " model evaluations, above the budget of ",
                                  base.budget));
  }

  engine::ExplainConfig inner = base;
  inner.workers = 1;
  inner.budget = per;
  std::vector<std::vector<double>> rows(m);
  std::vector<std::string> ids(m);
  POVEX_RETURN_IF_ERROR(engine::ParallelFor(m, base.workers, [&](size_t i) {
    const tabular::Household focal = dataset.Row(contrast.source_rows[i]);
    POVEX_ASSIGN_OR_RETURN(
        auto iv, engine.Explain(engine::Algorithm::kContrastive, focal, inner));
    POVEX_ASSIGN_OR_RETURN(rows[i], GroupMeans(iv.values, groups));
    ids[i] = focal.id;
    return absl::OkStatus();
  }));

  std::vector<ContrastiveDistribution::GroupInfo> infos;
  for (const auto& g : groups) infos.push_back({g.id, g.label});
  json config = {{"algorithm", "contrastive"},
                 {"bins", options.max_bins},
                 {"seed", base.seed},
                 {"resamples", base.resamples},
                 {"poverty_line", poverty.poverty_line}};
  return ContrastiveDistribution::Create(
      engine::ConfigFingerprint(base.context, engine::Algorithm::kContrastive,
                                options.max_bins, base.seed, base.resamples,
                                poverty.poverty_line),
      std::move(infos), std::move(ids), std::move(rows),
      options.built_at.empty() ? UtcTimestamp() : options.built_at,
      std::move(config));
}

absl::StatusOr<std::vector<double>> PercentileContrast(
    const GroupImportanceVector& focal, const ContrastiveDistribution& dist) {
  if (focal.fingerprint != dist.fingerprint()) {
    return MakeError(ErrorKind::kFingerprintMismatch,
                     absl::StrCat("explanation fingerprint ", focal.fingerprint,
                                  " differs from the distribution's ",
                                  dist.fingerprint()));
  }
  if (focal.values.size() != dist.num_groups()) {
    return MakeError(ErrorKind::kPartitionError,
                     absl::StrCat("focal has ", focal.values.size(),
                                  " groups, distribution has ",
                                  dist.num_groups()));
  }
  std::vector<double> out(focal.values.size());
  for (size_t g = 0; g < out.size(); ++g) {
    out[g] = dist.Percentile(g, focal.values[g]);
  }
  return out;
}

}  // namespace povex::groups
