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

#include "povex/tabular/schema.h"

#include <fstream>
#include <set>

#include "absl/strings/str_cat.h"
#include "povex/status.h"

namespace povex::tabular {

using nlohmann::json;

absl::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kNumeric:
      return "numeric";
    case FeatureKind::kCategorical:
      return "categorical";
    case FeatureKind::kBoolean:
      return "boolean";
  }
  return "numeric";
}

std::optional<FeatureKind> ParseFeatureKind(absl::string_view name) {
  if (name == "numeric") return FeatureKind::kNumeric;
  if (name == "categorical") return FeatureKind::kCategorical;
  if (name == "boolean") return FeatureKind::kBoolean;
  return std::nullopt;
}

std::string FeatureSchema::Label(double value) const {
  if (IsMissing(value)) return "";
  if (!is_discrete()) return json(value).dump();
  const auto code = static_cast<size_t>(value);
  if (code < categories.size()) return categories[code];
  return absl::StrCat("#", code);
}

std::optional<int> Schema::FeatureIndex(absl::string_view name) const {
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

namespace {

absl::Status SchemaError(absl::string_view message) {
  return MakeError(ErrorKind::kParseError, absl::StrCat("schema: ", message));
}

absl::StatusOr<FeatureSchema> ParseFeature(const json& item) {
  if (!item.is_object() || !item.contains("name") || !item.contains("kind")) {
    return SchemaError("every feature needs `name` and `kind`");
  }
  FeatureSchema feature;
  feature.name = item.at("name").get<std::string>();
  const auto kind = ParseFeatureKind(item.at("kind").get<std::string>());
  if (!kind.has_value()) {
    return SchemaError(absl::StrCat("feature `", feature.name,
                                    "` has unknown kind ",
                                    item.at("kind").dump()));
  }
  feature.kind = *kind;
  feature.group_id = item.value("group", std::string());
  feature.interpretable = item.value("interpretable", true);
  if (item.contains("unit") && !item.at("unit").is_null()) {
    feature.unit = item.at("unit").get<std::string>();
  }
  if (feature.kind == FeatureKind::kBoolean) {
    feature.categories = {"0", "1"};
  } else if (item.contains("categories")) {
    feature.categories = item.at("categories").get<std::vector<std::string>>();
  }
  return feature;
}

absl::StatusOr<ConditionalitySpec> ParseConditionality(const json& item,
                                                       size_t index) {
  if (!item.is_object() || !item.contains("drivers") ||
      !item.contains("dependents")) {
    return SchemaError("conditionalities need `drivers` and `dependents`");
  }
  ConditionalitySpec spec;
  spec.name = item.value("name", absl::StrCat("rule_", index));
  spec.dependents = item.at("dependents").get<std::vector<std::string>>();
  const json partition = item.value("partition", json::object());
  for (const auto& driver : item.at("drivers")) {
    DriverPartitionSpec part;
    part.feature = driver.get<std::string>();
    if (partition.contains(part.feature)) {
      const auto& p = partition.at(part.feature);
      if (p.contains("cuts")) {
        part.cuts = p.at("cuts").get<std::vector<double>>();
        for (size_t i = 1; i < part.cuts.size(); ++i) {
          if (!(part.cuts[i - 1] < part.cuts[i])) {
            return SchemaError(absl::StrCat("partition cuts for `",
                                            part.feature,
                                            "` must be strictly ascending"));
          }
        }
      }
      if (p.contains("groups")) {
        part.groups =
            p.at("groups").get<std::vector<std::vector<std::string>>>();
      }
    }
    spec.drivers.push_back(std::move(part));
  }
  return spec;
}

}  // namespace

absl::StatusOr<Schema> ParseSchema(const json& root) {
  if (!root.is_object()) return SchemaError("root must be an object");
  Schema schema;
  try {
    schema.schema_version = root.value("schema_version", 0);
    if (schema.schema_version != 1) {
      return SchemaError(absl::StrCat("unsupported schema_version ",
                                      schema.schema_version));
    }
    schema.missing_sentinel = root.value("missing_sentinel", std::string());
    if (root.contains("groups")) {
      for (const auto& g : root.at("groups")) {
        schema.groups.push_back({g.at("id").get<std::string>(),
                                 g.value("label", g.at("id").get<std::string>())});
      }
    }
    if (!root.contains("features") || !root.at("features").is_array()) {
      return SchemaError("`features` array is required");
    }
    for (const auto& item : root.at("features")) {
      POVEX_ASSIGN_OR_RETURN(FeatureSchema feature, ParseFeature(item));
      schema.features.push_back(std::move(feature));
    }
    if (root.contains("conditionalities")) {
      size_t index = 0;
      for (const auto& item : root.at("conditionalities")) {
        POVEX_ASSIGN_OR_RETURN(ConditionalitySpec spec,
                               ParseConditionality(item, index++));
        schema.conditionalities.push_back(std::move(spec));
      }
    }
    schema.poverty.poverty_line = root.value("poverty_line", 0.0);
    schema.poverty.min_contrastive_rows =
        root.value("min_contrastive_rows", 30);
    if (root.contains("columns")) {
      const auto& c = root.at("columns");
      schema.columns.income = c.value("income", std::string("income"));
      if (c.contains("id")) schema.columns.id = c.at("id").get<std::string>();
      if (c.contains("formal_income")) {
        schema.columns.formal_income = c.at("formal_income").get<std::string>();
      }
      if (c.contains("collection_date")) {
        schema.columns.collection_date =
            c.at("collection_date").get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    return SchemaError(e.what());
  }

  if (schema.features.empty()) return SchemaError("no features declared");
  if (!(schema.poverty.poverty_line > 0)) {
    return SchemaError("poverty_line must be > 0");
  }
  if (schema.poverty.min_contrastive_rows < 1) {
    return SchemaError("min_contrastive_rows must be >= 1");
  }
  std::set<std::string> names;
  std::set<std::string> group_ids;
  for (const auto& g : schema.groups) {
    if (!group_ids.insert(g.id).second) {
      return SchemaError(absl::StrCat("duplicate group id `", g.id, "`"));
    }
  }
  for (const auto& f : schema.features) {
    if (!names.insert(f.name).second) {
      return SchemaError(absl::StrCat("duplicate feature name `", f.name, "`"));
    }
    if (!group_ids.contains(f.group_id)) {
      return SchemaError(absl::StrCat("feature `", f.name,
                                      "` references undeclared group `",
                                      f.group_id, "`"));
    }
  }
  return schema;
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot open schema file ", path));
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    return SchemaError(absl::StrCat(path, ": ", e.what()));
  }
  return ParseSchema(root);
}

json SchemaToJson(const Schema& schema) {
  json root;
  root["schema_version"] = schema.schema_version;
  root["missing_sentinel"] = schema.missing_sentinel;
  root["poverty_line"] = schema.poverty.poverty_line;
  root["min_contrastive_rows"] = schema.poverty.min_contrastive_rows;
  json columns = {{"income", schema.columns.income}};
  if (schema.columns.id) columns["id"] = *schema.columns.id;
  if (schema.columns.formal_income) {
    columns["formal_income"] = *schema.columns.formal_income;
  }
  if (schema.columns.collection_date) {
    columns["collection_date"] = *schema.columns.collection_date;
  }
  root["columns"] = columns;
  root["groups"] = json::array();
  for (const auto& g : schema.groups) {
    root["groups"].push_back({{"id", g.id}, {"label", g.label}});
  }
  root["features"] = json::array();
  for (const auto& f : schema.features) {
    json item = {{"name", f.name},
                 {"kind", FeatureKindName(f.kind)},
                 {"group", f.group_id}};
    if (f.unit) item["unit"] = *f.unit;
    if (f.kind == FeatureKind::kCategorical && !f.categories.empty()) {
      item["categories"] = f.categories;
    }
    root["features"].push_back(item);
  }
  root["conditionalities"] = json::array();
  for (const auto& c : schema.conditionalities) {
    json drivers = json::array();
    json partition = json::object();
    for (const auto& d : c.drivers) {
      drivers.push_back(d.feature);
      json p = json::object();
      if (!d.cuts.empty()) p["cuts"] = d.cuts;
      if (!d.groups.empty()) p["groups"] = d.groups;
      partition[d.feature] = p;
    }
    root["conditionalities"].push_back({{"name", c.name},
                                        {"drivers", drivers},
                                        {"partition", partition},
                                        {"dependents", c.dependents}});
  }
  return root;
}

}  // namespace povex::tabular
