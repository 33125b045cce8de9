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

#include "povex/tabular/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "povex/hash.h"
#include "povex/status.h"

namespace povex::tabular {

std::vector<bool> Household::missing_mask() const {
  std::vector<bool> mask(values.size());
  for (size_t j = 0; j < values.size(); ++j) mask[j] = IsMissing(j);
  return mask;
}

std::vector<size_t> Household::MissingIndices() const {
  std::vector<size_t> out;
  for (size_t j = 0; j < values.size(); ++j) {
    if (IsMissing(j)) out.push_back(j);
  }
  return out;
}

absl::StatusOr<Dataset> Dataset::Create(std::vector<FeatureSchema> features,
                                        std::vector<std::vector<double>> columns,
                                        std::vector<double> income,
                                        RowMetadata metadata,
                                        std::string source_tag) {
  if (features.empty()) {
    return MakeError(ErrorKind::kSchemaMismatch, "dataset needs d >= 1");
  }
  if (income.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "dataset has no rows");
  }
  if (columns.size() != features.size()) {
    return MakeError(ErrorKind::kSchemaMismatch,
                     absl::StrCat("expected ", features.size(),
                                  " columns, got ", columns.size()));
  }
  const size_t n = income.size();
  for (size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) {
      return MakeError(ErrorKind::kSchemaMismatch,
                       absl::StrCat("column `", features[j].name, "` has ",
                                    columns[j].size(), " entries, expected ",
                                    n));
    }
    if (features[j].kind == FeatureKind::kBoolean) {
      features[j].categories = {"0", "1"};
    }
  }
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(income[i])) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("row ", i, ": income is not finite"));
    }
  }
  if (metadata.ids.empty()) {
    metadata.ids.reserve(n);
    for (size_t i = 0; i < n; ++i) metadata.ids.push_back(std::to_string(i));
  }
  metadata.formal_income.resize(n);
  metadata.collection_date.resize(n);
  if (metadata.ids.size() != n) {
    return MakeError(ErrorKind::kSchemaMismatch, "id count differs from n");
  }
  auto storage = std::make_shared<Storage>();
  storage->features = std::move(features);
  storage->columns = std::move(columns);
  storage->income = std::move(income);
  storage->metadata = std::move(metadata);
  storage->source_tag = std::move(source_tag);
  return Dataset(std::move(storage));
}

std::optional<int> Dataset::FeatureIndex(absl::string_view name) const {
  for (size_t j = 0; j < num_features(); ++j) {
    if (storage_->features[j].name == name) return static_cast<int>(j);
  }
  return std::nullopt;
}

Household Dataset::Row(size_t row) const {
  Household h;
  h.values.resize(num_features());
  for (size_t j = 0; j < num_features(); ++j) {
    h.values[j] = storage_->columns[j][row];
  }
  h.id = storage_->metadata.ids[row];
  h.observed_formal_income = storage_->metadata.formal_income[row];
  h.collection_date = storage_->metadata.collection_date[row];
  return h;
}

std::optional<size_t> Dataset::RowIndexById(absl::string_view id) const {
  const auto& ids = storage_->metadata.ids;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return i;
  }
  return std::nullopt;
}

Dataset Dataset::Subset(std::span<const size_t> rows,
                        std::string source_tag) const {
  auto storage = std::make_shared<Storage>();
  storage->features = storage_->features;
  storage->columns.resize(num_features());
  for (size_t j = 0; j < num_features(); ++j) {
    storage->columns[j].reserve(rows.size());
    for (const size_t r : rows) {
      storage->columns[j].push_back(storage_->columns[j][r]);
    }
  }
  for (const size_t r : rows) {
    storage->income.push_back(storage_->income[r]);
    storage->metadata.ids.push_back(storage_->metadata.ids[r]);
    storage->metadata.formal_income.push_back(
        storage_->metadata.formal_income[r]);
    storage->metadata.collection_date.push_back(
        storage_->metadata.collection_date[r]);
  }
  storage->source_tag = std::move(source_tag);
  return Dataset(std::move(storage));
}

uint64_t Dataset::ContentHash() const {
  Fnv1a64 h;
  h.U64(num_rows()).U64(num_features());
  for (const auto& f : storage_->features) {
    h.Str(f.name).Str(FeatureKindName(f.kind)).Str(f.group_id);
    h.U64(f.categories.size());
    for (const auto& c : f.categories) h.Str(c);
  }
  for (const auto& column : storage_->columns) {
    for (const double v : column) h.F64(v);
  }
  for (const double y : storage_->income) h.F64(y);
  for (const auto& id : storage_->metadata.ids) h.Str(id);
  return h.digest();
}

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsvRecords(
    absl::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  // Skip a UTF-8 byte order mark.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          return MakeError(ErrorKind::kParseError,
                           absl::StrCat("line ", line,
                                        ": quote inside unquoted field"));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    return MakeError(ErrorKind::kParseError, "unterminated quoted field");
  }
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

namespace {

absl::Status CellError(size_t row, const std::string& column,
                       absl::string_view cell, absl::string_view what) {
  return MakeError(ErrorKind::kParseError,
                   absl::StrCat("row ", row + 1, " (line ", row + 2,
                                "), column `", column, "`: cannot parse \"",
                                cell, "\" as ", what));
}

std::optional<double> ParseNumber(absl::string_view cell) {
  cell = absl::StripAsciiWhitespace(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<double> ParseBool(absl::string_view cell) {
  const std::string lower =
      absl::AsciiStrToLower(absl::StripAsciiWhitespace(cell));
  if (lower == "1" || lower == "true" || lower == "yes") return 1.0;
  if (lower == "0" || lower == "false" || lower == "no") return 0.0;
  return std::nullopt;
}

}  // namespace

absl::StatusOr<Dataset> ParseDatasetCsv(absl::string_view csv_text,
                                        const Schema& schema,
                                        std::string source_tag) {
  POVEX_ASSIGN_OR_RETURN(auto records, ParseCsvRecords(csv_text));
  // Trailing blank lines.
  while (!records.empty() && records.back().size() == 1 &&
         records.back()[0].empty()) {
    records.pop_back();
  }
  if (records.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "CSV has no header");
  }
  const auto& header = records.front();

  std::map<std::string, size_t> position;
  for (size_t c = 0; c < header.size(); ++c) {
    if (!position.emplace(header[c], c).second) {
      return MakeError(ErrorKind::kSchemaMismatch,
                       absl::StrCat("duplicate CSV column `", header[c], "`"));
    }
  }
  std::set<std::string> expected;
  for (const auto& f : schema.features) expected.insert(f.name);
  expected.insert(schema.columns.income);
  for (const auto* role : {&schema.columns.id, &schema.columns.formal_income,
                           &schema.columns.collection_date}) {
    if (role->has_value()) expected.insert(**role);
  }
  std::vector<std::string> absent;
  std::vector<std::string> extra;
  for (const auto& name : expected) {
    if (!position.contains(name)) absent.push_back(name);
  }
  for (const auto& [name, unused] : position) {
    if (!expected.contains(name)) extra.push_back(name);
  }
  if (!absent.empty() || !extra.empty()) {
    return MakeError(
        ErrorKind::kSchemaMismatch,
        absl::StrCat("CSV columns differ from schema; missing from CSV: [",
                     absl::StrJoin(absent, ", "), "], not in schema: [",
                     absl::StrJoin(extra, ", "), "]"));
  }
  const size_t n = records.size() - 1;
  if (n == 0) return MakeError(ErrorKind::kEmptyDataset, "CSV has no rows");

  auto is_missing_cell = [&](absl::string_view cell) {
    return cell.empty() || cell == schema.missing_sentinel;
  };

  std::vector<FeatureSchema> features = schema.features;
  const size_t d = features.size();
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != header.size()) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("row ", i, " (line ", i + 1, ") has ",
                                    records[i].size(), " fields, expected ",
                                    header.size()));
    }
  }
  // Category dictionaries not declared in the schema are the sorted observed
  // labels.
  for (auto& f : features) {
    if (f.kind != FeatureKind::kCategorical || !f.categories.empty()) continue;
    std::set<std::string> labels;
    const size_t c = position.at(f.name);
    for (size_t i = 1; i < records.size(); ++i) {
      if (!is_missing_cell(records[i][c])) labels.insert(records[i][c]);
    }
    f.categories.assign(labels.begin(), labels.end());
  }

  std::vector<std::vector<double>> columns(d, std::vector<double>(n));
  for (size_t j = 0; j < d; ++j) {
    const auto& f = features[j];
    const size_t c = position.at(f.name);
    std::map<absl::string_view, double> codes;
    for (size_t k = 0; k < f.categories.size(); ++k) {
      codes.emplace(f.categories[k], static_cast<double>(k));
    }
    for (size_t r = 0; r < n; ++r) {
      const std::string& cell = records[r + 1][c];
      if (is_missing_cell(cell)) {
        columns[j][r] = kMissing;
        continue;
      }
      switch (f.kind) {
        case FeatureKind::kNumeric: {
          const auto v = ParseNumber(cell);
          if (!v) return CellError(r, f.name, cell, "numeric");
          columns[j][r] = *v;
          break;
        }
        case FeatureKind::kBoolean: {
          const auto v = ParseBool(cell);
          if (!v) return CellError(r, f.name, cell, "boolean");
          columns[j][r] = *v;
          break;
        }
        case FeatureKind::kCategorical: {
          const auto it = codes.find(cell);
          if (it == codes.end()) {
            return CellError(r, f.name, cell, "a declared category");
          }
          columns[j][r] = it->second;
          break;
        }
      }
    }
  }

  std::vector<double> income(n);
  RowMetadata metadata;
  const size_t income_col = position.at(schema.columns.income);
  for (size_t r = 0; r < n; ++r) {
    const std::string& cell = records[r + 1][income_col];
    if (is_missing_cell(cell)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("row ", r + 1, " (line ", r + 2,
                                    "): ground-truth income `",
                                    schema.columns.income, "` is missing"));
    }
    const auto v = ParseNumber(cell);
    if (!v) return CellError(r, schema.columns.income, cell, "numeric");
    income[r] = *v;
  }
  if (schema.columns.id) {
    const size_t c = position.at(*schema.columns.id);
    std::set<absl::string_view> seen;
    for (size_t r = 0; r < n; ++r) {
      const std::string& id = records[r + 1][c];
      if (id.empty() || !seen.insert(id).second) {
        return MakeError(ErrorKind::kParseError,
                         absl::StrCat("row ", r + 1, ": household id \"", id,
                                      "\" is empty or duplicated"));
      }
      metadata.ids.push_back(id);
    }
  }
  metadata.formal_income.resize(n);
  metadata.collection_date.resize(n);
  if (schema.columns.formal_income) {
    const size_t c = position.at(*schema.columns.formal_income);
    for (size_t r = 0; r < n; ++r) {
      const std::string& cell = records[r + 1][c];
      if (is_missing_cell(cell)) continue;
      const auto v = ParseNumber(cell);
      if (!v) return CellError(r, *schema.columns.formal_income, cell, "numeric");
      metadata.formal_income[r] = *v;
    }
  }
  if (schema.columns.collection_date) {
    const size_t c = position.at(*schema.columns.collection_date);
    for (size_t r = 0; r < n; ++r) {
      const std::string& cell = records[r + 1][c];
      if (!is_missing_cell(cell)) metadata.collection_date[r] = cell;
    }
  }
  return Dataset::Create(std::move(features), std::move(columns),
                         std::move(income), std::move(metadata),
                         std::move(source_tag));
}

absl::StatusOr<Dataset> LoadDataset(const std::string& csv_path,
                                    const Schema& schema) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot open dataset file ", csv_path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseDatasetCsv(buffer.str(), schema, csv_path);
}

absl::StatusOr<Dataset> LoadDataset(const std::string& csv_path,
                                    const std::string& schema_path) {
  POVEX_ASSIGN_OR_RETURN(Schema schema, LoadSchema(schema_path));
  return LoadDataset(csv_path, schema);
}

}  // namespace povex::tabular

namespace povex::tabular {
namespace {

std::string CsvNumber(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ec == std::errc() ? ptr : buffer);
}

std::string CsvField(absl::string_view text) {
  if (text.find_first_of(",\"\r\n") == absl::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string DatasetToCsv(const Dataset& dataset, const Schema& schema) {
  std::vector<std::string> header;
  for (const auto& f : dataset.features()) header.push_back(CsvField(f.name));
  header.push_back(CsvField(schema.columns.income));
  if (schema.columns.id) header.push_back(CsvField(*schema.columns.id));
  if (schema.columns.formal_income) {
    header.push_back(CsvField(*schema.columns.formal_income));
  }
  if (schema.columns.collection_date) {
    header.push_back(CsvField(*schema.columns.collection_date));
  }
  std::string out = absl::StrJoin(header, ",");
  out.push_back('\n');
  const auto& meta = dataset.metadata();
  std::vector<std::string> fields;
  for (size_t r = 0; r < dataset.num_rows(); ++r) {
    fields.clear();
    for (size_t j = 0; j < dataset.num_features(); ++j) {
      const auto& f = dataset.feature(j);
      const double v = dataset.value(r, j);
      if (IsMissing(v)) {
        fields.emplace_back();
      } else if (f.is_discrete()) {
        fields.push_back(CsvField(f.Label(v)));
      } else {
        fields.push_back(CsvNumber(v));
      }
    }
    fields.push_back(CsvNumber(dataset.income()[r]));
    if (schema.columns.id) {
      fields.push_back(CsvField(r < meta.ids.size() ? meta.ids[r]
                                                      : absl::StrCat(r)));
    }
    if (schema.columns.formal_income) {
      const auto& v = r < meta.formal_income.size() ? meta.formal_income[r]
                                                    : std::nullopt;
      fields.push_back(v ? CsvNumber(*v) : std::string());
    }
    if (schema.columns.collection_date) {
      const auto& v = r < meta.collection_date.size() ? meta.collection_date[r]
                                                      : std::nullopt;
      fields.push_back(v ? CsvField(*v) : std::string());
    }
    out += absl::StrJoin(fields, ",");
    out.push_back('\n');
  }
  return out;
}

}  // namespace povex::tabular
