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

#ifndef POVEX_TABULAR_SCHEMA_H_
#define POVEX_TABULAR_SCHEMA_H_

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace povex::tabular {

// In-memory sentinel for a missing cell. Categorical and boolean features
// treat it as a regular category; numeric features exclude it from value sets.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool IsMissing(double value) { return std::isnan(value); }

// Equality where two missing values compare equal.
inline bool SameValue(double a, double b) {
  return (IsMissing(a) && IsMissing(b)) || a == b;
}

enum class FeatureKind { kNumeric, kCategorical, kBoolean };

absl::string_view FeatureKindName(FeatureKind kind);
std::optional<FeatureKind> ParseFeatureKind(absl::string_view name);

struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::string group_id;
  bool interpretable = true;
  std::optional<std::string> unit;
  // Category labels. Categorical cells are stored as the index of their label.
  // Booleans always use {"0", "1"}.
  std::vector<std::string> categories;

  bool is_discrete() const { return kind != FeatureKind::kNumeric; }
  // Label for a stored value, "" for missing.
  std::string Label(double value) const;
};

struct FeatureGroupDecl {
  std::string id;
  std::string label;
};

// Partition of one driver's domain, as declared in the schema file.
// Numeric drivers use ascending `cuts`: subset i holds [cuts[i-1], cuts[i]).
// Discrete drivers use `groups` of labels; with no groups every category is
// its own subset.
struct DriverPartitionSpec {
  std::string feature;
  std::vector<double> cuts;
  std::vector<std::vector<std::string>> groups;
};

struct ConditionalitySpec {
  std::string name;
  std::vector<DriverPartitionSpec> drivers;
  std::vector<std::string> dependents;
};

struct PovertyConfig {
  double poverty_line = 0.0;
  int min_contrastive_rows = 30;
};

// Names of the non-feature CSV columns.
struct ColumnRoles {
  std::string income = "income";
  std::optional<std::string> id;
  std::optional<std::string> formal_income;
  std::optional<std::string> collection_date;
};

struct Schema {
  int schema_version = 1;
  std::vector<FeatureSchema> features;
  std::vector<FeatureGroupDecl> groups;
  std::vector<ConditionalitySpec> conditionalities;
  PovertyConfig poverty;
  std::string missing_sentinel;
  ColumnRoles columns;

  std::optional<int> FeatureIndex(absl::string_view name) const;
};

absl::StatusOr<Schema> ParseSchema(const nlohmann::json& json);
absl::StatusOr<Schema> LoadSchema(const std::string& path);
nlohmann::json SchemaToJson(const Schema& schema);

}  // namespace povex::tabular

#endif  // POVEX_TABULAR_SCHEMA_H_
