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

#ifndef POVEX_PREDICTOR_MODEL_H_
#define POVEX_PREDICTOR_MODEL_H_

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "povex/predictor/pipeline.h"
#include "povex/tabular/dataset.h"

namespace povex::predictor {

// Opaque income-per-capita predictor over encoded instances. Implementations
// must be pure: equal inputs give equal outputs, and the batch form agrees
// elementwise with single evaluations.
class PredictorModel {
 public:
  virtual ~PredictorModel() = default;

  // `rows` is row-major with `width` values per row; one output per row.
  virtual absl::Status PredictBatch(std::span<const double> rows, size_t width,
                                    std::span<double> out) const = 0;

  virtual std::string model_id() const = 0;
  virtual std::string training_fingerprint() const { return {}; }

  // Versioned JSON dump; nullopt for models that cannot be persisted.
  virtual std::optional<nlohmann::json> ToJson() const { return std::nullopt; }

  absl::StatusOr<double> PredictOne(std::span<const double> encoded) const;
};

class ConstantModel final : public PredictorModel {
 public:
  explicit ConstantModel(double value) : value_(value) {}
  absl::Status PredictBatch(std::span<const double> rows, size_t width,
                            std::span<double> out) const override;
  std::string model_id() const override;
  std::optional<nlohmann::json> ToJson() const override;

 private:
  double value_;
};

// intercept + coefficients . x
class LinearModel final : public PredictorModel {
 public:
  LinearModel(std::vector<double> coefficients, double intercept,
              std::string training_fingerprint = {})
      : coefficients_(std::move(coefficients)),
        intercept_(intercept),
        training_fingerprint_(std::move(training_fingerprint)) {}

  absl::Status PredictBatch(std::span<const double> rows, size_t width,
                            std::span<double> out) const override;
  std::string model_id() const override;
  std::string training_fingerprint() const override {
    return training_fingerprint_;
  }
  std::optional<nlohmann::json> ToJson() const override;

  const std::vector<double>& coefficients() const { return coefficients_; }
  double intercept() const { return intercept_; }

 private:
  std::vector<double> coefficients_;
  double intercept_;
  std::string training_fingerprint_;
};

// scale * base + offset.
class AffineModel final : public PredictorModel {
 public:
  AffineModel(std::shared_ptr<const PredictorModel> base, double scale,
              double offset)
      : base_(std::move(base)), scale_(scale), offset_(offset) {}
  absl::Status PredictBatch(std::span<const double> rows, size_t width,
                            std::span<double> out) const override;
  std::string model_id() const override;

 private:
  std::shared_ptr<const PredictorModel> base_;
  double scale_;
  double offset_;
};

// Wraps a pure function of the encoded row.
class FunctionModel final : public PredictorModel {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  FunctionModel(Fn fn, std::string id) : fn_(std::move(fn)), id_(std::move(id)) {}
  absl::Status PredictBatch(std::span<const double> rows, size_t width,
                            std::span<double> out) const override;
  std::string model_id() const override { return id_; }

 private:
  Fn fn_;
  std::string id_;
};

// M(pipeline(raw)).
absl::StatusOr<double> Predict(const PredictorModel& model,
                               const PreprocessPipeline& pipeline,
                               const tabular::Household& raw);

// Elementwise Predict, order preserved. Errors name the offending index.
absl::StatusOr<std::vector<double>> PredictBatch(
    const PredictorModel& model, const PreprocessPipeline& pipeline,
    std::span<const tabular::Household> raws);

// Encodes `count` raw row-major rows and evaluates them in one model call.
absl::Status PredictRawRows(const PredictorModel& model,
                            const PreprocessPipeline& pipeline,
                            std::span<const double> raw_rows,
                            std::span<double> out);

}  // namespace povex::predictor

#endif  // POVEX_PREDICTOR_MODEL_H_
