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

#include "tools/app/report.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "povex/status.h"

namespace povex::app {

using nlohmann::json;

namespace {

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

absl::StatusOr<json> BuildReport(
    const engine::ImportanceVector& importances,
    const tabular::Household& household,
    const std::vector<tabular::FeatureSchema>& features,
    const std::vector<groups::FeatureGroup>& groups,
    const groups::ContrastiveDistribution* distribution,
    const ReportProvenance& provenance) {
  if (importances.values.size() != features.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "importance vector does not match the schema");
  }
  POVEX_ASSIGN_OR_RETURN(auto group_values,
                         groups::GroupImportances(importances, groups));

  json report;
  report["report_version"] = 1;
  report["household_id"] = household.id;
  report["predicted_income"] = importances.predicted_income;
  report["observed_formal_income"] = OptionalNumber(household.observed_formal_income);
  report["collection_date"] = household.collection_date
                                  ? json(*household.collection_date)
                                  : json(nullptr);
  json missing = json::array();
  for (const size_t j : household.MissingIndices()) {
    missing.push_back(features[j].name);
  }
  report["missing_variables"] = missing;

  json items = json::array();
  for (size_t j = 0; j < features.size(); ++j) {
    items.push_back({{"feature", features[j].name},
                     {"group", features[j].group_id},
                     {"value", importances.values[j]}});
  }
  report["importances"] = items;

  json group_items = json::array();
  for (size_t g = 0; g < groups.size(); ++g) {
    group_items.push_back({{"group", groups[g].id},
                           {"label", groups[g].label},
                           {"value", group_values.values[g]}});
  }
  report["group_importances"] = group_items;

  if (distribution != nullptr) {
    POVEX_ASSIGN_OR_RETURN(auto percentiles,
                           groups::PercentileContrast(group_values, *distribution));
    json rows = json::array();
    for (size_t g = 0; g < groups.size(); ++g) {
      rows.push_back({{"group", groups[g].id},
                      {"percentile", percentiles[g]},
                      {"contrast_median", distribution->Median(g)}});
    }
    report["percentiles"] = rows;
  } else {
    report["percentiles"] = nullptr;
  }

  json warnings = json::array();
  for (const auto& w : importances.warnings) {
    warnings.push_back({{"code", w.code},
                        {"feature", w.feature_name},
                        {"rule", w.rule},
                        {"count", w.count}});
  }
  report["warnings"] = warnings;
  report["sign_convention"] = kSignConvention;
  report["unit"] = "currency per capita";
  report["evaluations"] = importances.evaluations;
  report["fingerprint"] = {
      {"digest", importances.fingerprint},
      {"algorithm", std::string(engine::AlgorithmName(importances.algorithm))},
      {"bins", importances.max_bins},
      {"seed", importances.seed},
      {"resamples", importances.resamples},
      {"poverty_line", OptionalNumber(importances.poverty_line)},
      {"dataset", provenance.dataset_hash},
      {"model", provenance.model_id}};
  return report;
}

std::string DumpJson(const json& value) { return value.dump(2) + "\n"; }

int HistogramBin(const std::vector<double>& edges, double x) {
  const int bins = static_cast<int>(edges.size()) - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const int index = static_cast<int>(it - edges.begin()) - 1;
  return std::clamp(index, 0, bins - 1);
}

json BuildHistogram(std::span<const double> incomes, int bins,
                    const std::optional<HistogramMarker>& marker) {
  bins = std::max(bins, 1);
  const auto [lo_it, hi_it] = std::minmax_element(incomes.begin(), incomes.end());
  const double lo = incomes.empty() ? 0.0 : *lo_it;
  const double hi = incomes.empty() ? 0.0 : *hi_it;
  std::vector<double> edges(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
  }
  edges[bins] = hi;
  std::vector<uint64_t> counts(bins, 0);
  for (const double y : incomes) ++counts[HistogramBin(edges, y)];

  json out = {{"histogram_version", 1},
              {"unit", "currency per capita"},
              {"n", incomes.size()},
              {"edges", edges},
              {"counts", counts}};
  if (marker) {
    out["focal"] = {{"household_id", marker->household_id},
                    {"predicted_income", marker->predicted_income},
                    {"bin", HistogramBin(edges, marker->predicted_income)}};
    if (marker->observed_formal_income) {
      out["observed_formal_income"] = {
          {"value", *marker->observed_formal_income},
          {"bin", HistogramBin(edges, *marker->observed_formal_income)}};
    } else {
      out["observed_formal_income"] = nullptr;
    }
  } else {
    out["focal"] = nullptr;
    out["observed_formal_income"] = nullptr;
  }
  return out;
}

absl::StatusOr<json> BuildRadar(const std::string& household_id,
                                const groups::GroupImportanceVector& focal,
                                const groups::ContrastiveDistribution& distribution) {
  POVEX_ASSIGN_OR_RETURN(auto percentiles,
                         groups::PercentileContrast(focal, distribution));
  json axes = json::array();
  for (size_t g = 0; g < distribution.num_groups(); ++g) {
    axes.push_back({{"group", distribution.groups()[g].id},
                    {"label", distribution.groups()[g].label},
                    {"percentile", percentiles[g]},
                    {"focal_value", focal.values[g]},
                    {"contrast_median", distribution.Median(g)}});
  }
  return json{{"radar_version", 1},
              {"household_id", household_id},
              {"fingerprint", distribution.fingerprint()},
              {"contrast_size", distribution.num_rows()},
              {"groups", axes}};
}

absl::StatusOr<groups::GroupImportanceVector> GroupsFromReport(
    const json& report) {
  groups::GroupImportanceVector out;
  try {
    if (report.value("report_version", 0) != 1) {
      return MakeError(ErrorKind::kParseError, "unsupported report_version");
    }
    out.household_id = report.at("household_id").get<std::string>();
    out.fingerprint = report.at("fingerprint").at("digest").get<std::string>();
    for (const auto& g : report.at("group_importances")) {
      out.values.push_back(g.at("value").get<double>());
    }
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kParseError, absl::StrCat("report: ", e.what()));
  }
  return out;
}

}  // namespace povex::app
