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

#ifndef POVEX_PREDICTOR_PIPELINE_H_
#define POVEX_PREDICTOR_PIPELINE_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"

namespace povex::predictor {

enum class EncodingStep {
  kPassthrough,    // numeric value (missing -> impute, or reject)
  kLog1p,          // log(1 + max(x, 0)); an expert-derived variable
  kOneHot,         // one indicator per category, plus one for missing
  kQuantileBins,   // one indicator per interval between cuts
};

struct FeatureEncoding {
  size_t feature = 0;
  EncodingStep step = EncodingStep::kPassthrough;
  // Value used for missing numeric cells. NaN rejects missing input.
  double impute = tabular::kMissing;
  size_t num_categories = 0;
  std::vector<double> cuts;

  size_t width() const;
};

struct EncodedColumn {
  std::string name;
  // Interpretable source feature, -1 for the synthetic intercept column.
  int source_feature = -1;
  bool synthetic_intercept = false;
};

// Raw (interpretable) household -> fixed-width encoded vector. Perturbation
// always happens in raw space; the pipeline is re-applied to every artificial
// instance.
class PreprocessPipeline {
 public:
  struct Options {
    bool one_hot_discrete = true;
    bool impute_numeric_mean = true;
    std::vector<std::string> log1p_features;
    std::map<std::string, int> binned_features;  // name -> number of bins
    bool intercept_column = false;
  };

  PreprocessPipeline() = default;

  // Every raw value passes through unchanged; missing cells are rejected.
  static PreprocessPipeline Identity(
      const std::vector<tabular::FeatureSchema>& features);

  static absl::StatusOr<PreprocessPipeline> Fit(const tabular::Dataset& dataset,
                                                const Options& options);
  static absl::StatusOr<PreprocessPipeline> Fit(const tabular::Dataset& dataset) {
    return Fit(dataset, Options());
  }

  size_t raw_width() const { return raw_width_; }
  size_t width() const { return columns_.size(); }
  const std::vector<EncodedColumn>& columns() const { return columns_; }
  const std::vector<FeatureEncoding>& encodings() const { return encodings_; }

  // EncodingError when a value lies outside the declared domain.
  absl::Status Encode(std::span<const double> raw, std::span<double> out) const;
  absl::StatusOr<std::vector<double>> Encode(
      const tabular::Household& household) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<PreprocessPipeline> FromJson(const nlohmann::json& json);
  std::string Fingerprint() const;

 private:
  void BuildColumns(const std::vector<tabular::FeatureSchema>& features);

  size_t raw_width_ = 0;
  bool intercept_ = false;
  std::vector<std::string> feature_names_;
  std::vector<FeatureEncoding> encodings_;
  std::vector<EncodedColumn> columns_;
};

struct InterpretableEffects {
  std::vector<double> per_feature;
  std::vector<size_t> dropped_columns;  // synthetic-intercept columns
};

// Sums the effects of encoded columns sharing a source feature.
absl::StatusOr<InterpretableEffects> EncodedToInterpretableEffects(
    std::span<const double> effects, const PreprocessPipeline& pipeline);

}  // namespace povex::predictor

#endif  // POVEX_PREDICTOR_PIPELINE_H_
