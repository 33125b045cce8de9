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

#ifndef POVEX_TABULAR_DATASET_H_
#define POVEX_TABULAR_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "povex/tabular/schema.h"

namespace povex::tabular {

// One household: the focal instance or an artificial (perturbed) copy.
struct Household {
  std::vector<double> values;
  std::string id;
  std::optional<double> observed_formal_income;
  std::optional<std::string> collection_date;

  bool IsMissing(size_t j) const { return tabular::IsMissing(values[j]); }
  std::vector<bool> missing_mask() const;
  std::vector<size_t> MissingIndices() const;
};

// Per-row metadata that is carried along but never perturbed.
struct RowMetadata {
  std::vector<std::string> ids;
  std::vector<std::optional<double>> formal_income;
  std::vector<std::optional<std::string>> collection_date;
};

// Immutable columnar table X with ground-truth income Y. Copies share storage.
class Dataset {
 public:
  // Validates shapes: every column and the income vector hold n >= 1 entries.
  static absl::StatusOr<Dataset> Create(std::vector<FeatureSchema> features,
                                        std::vector<std::vector<double>> columns,
                                        std::vector<double> income,
                                        RowMetadata metadata = {},
                                        std::string source_tag = "memory");

  size_t num_rows() const { return storage_->income.size(); }
  size_t num_features() const { return storage_->features.size(); }

  const std::vector<FeatureSchema>& features() const {
    return storage_->features;
  }
  const FeatureSchema& feature(size_t j) const { return storage_->features[j]; }
  std::optional<int> FeatureIndex(absl::string_view name) const;

  std::span<const double> column(size_t j) const {
    return storage_->columns[j];
  }
  double value(size_t row, size_t j) const { return storage_->columns[j][row]; }
  std::span<const double> income() const { return storage_->income; }
  const RowMetadata& metadata() const { return storage_->metadata; }
  const std::string& source_tag() const { return storage_->source_tag; }

  Household Row(size_t row) const;
  std::optional<size_t> RowIndexById(absl::string_view id) const;

  // Rows in the given order; metadata follows the rows.
  Dataset Subset(std::span<const size_t> rows, std::string source_tag) const;

  // Stable 64-bit digest of the schema, cells and income.
  uint64_t ContentHash() const;

 private:
  struct Storage {
    std::vector<FeatureSchema> features;
    std::vector<std::vector<double>> columns;
    std::vector<double> income;
    RowMetadata metadata;
    std::string source_tag;
  };
  explicit Dataset(std::shared_ptr<const Storage> storage)
      : storage_(std::move(storage)) {}

  std::shared_ptr<const Storage> storage_;
};

// Reads an RFC-4180 CSV whose header must name exactly the schema's feature
// columns plus the declared role columns. Empty (or sentinel) cells are
// missing; rows without ground-truth income are rejected.
absl::StatusOr<Dataset> LoadDataset(const std::string& csv_path,
                                    const Schema& schema);
absl::StatusOr<Dataset> LoadDataset(const std::string& csv_path,
                                    const std::string& schema_path);
absl::StatusOr<Dataset> ParseDatasetCsv(absl::string_view csv_text,
                                        const Schema& schema,
                                        std::string source_tag);

// Inverse of ParseDatasetCsv: header of features then role columns, numbers
// in shortest round-trip form, missing cells empty.
std::string DatasetToCsv(const Dataset& dataset, const Schema& schema);

// Splits CSV text into records of fields (RFC-4180 quoting).
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsvRecords(
    absl::string_view text);

}  // namespace povex::tabular

#endif  // POVEX_TABULAR_DATASET_H_
