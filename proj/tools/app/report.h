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

#ifndef POVEX_TOOLS_APP_REPORT_H_
#define POVEX_TOOLS_APP_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "povex/engine/engine.h"
#include "povex/groups/groups.h"
#include "povex/tabular/dataset.h"

namespace povex::app {

inline constexpr char kSignConvention[] =
    "Positive importance means the focal household's actual value raises its "
    "predicted income relative to the reference distribution.";

// Provenance folded into the report's fingerprint block.
struct ReportProvenance {
  std::string dataset_hash;
  std::string model_id;
};

// Report JSON, `report_version: 1`. `percentiles` is null unless a
// distribution is supplied (contrastive reports only).
absl::StatusOr<nlohmann::json> BuildReport(
    const engine::ImportanceVector& importances,
    const tabular::Household& household,
    const std::vector<tabular::FeatureSchema>& features,
    const std::vector<groups::FeatureGroup>& groups,
    const groups::ContrastiveDistribution* distribution,
    const ReportProvenance& provenance);

// Serialized form shared by the CLI and the service.
std::string DumpJson(const nlohmann::json& json);

struct HistogramMarker {
  std::string household_id;
  double predicted_income = 0;
  std::optional<double> observed_formal_income;
};

inline constexpr int kDefaultHistogramBins = 20;

// Equal-width bins over [min(Y), max(Y)], last bin closed.
nlohmann::json BuildHistogram(std::span<const double> incomes, int bins,
                              const std::optional<HistogramMarker>& marker);
// Bin of `x` for the given edges; clamps outside values.
int HistogramBin(const std::vector<double>& edges, double x);

// Per-group percentile of the focal against the distribution plus the
// contrast set's median group importance.
absl::StatusOr<nlohmann::json> BuildRadar(
    const std::string& household_id,
    const groups::GroupImportanceVector& focal,
    const groups::ContrastiveDistribution& distribution);

// Recovers group importances and fingerprint from a report.
absl::StatusOr<groups::GroupImportanceVector> GroupsFromReport(
    const nlohmann::json& report);

}  // namespace povex::app

#endif  // POVEX_TOOLS_APP_REPORT_H_
