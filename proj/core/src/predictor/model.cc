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

#include "povex/predictor/model.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "povex/hash.h"
#include "povex/status.h"

namespace povex::predictor {

using nlohmann::json;

namespace {

absl::Status CheckShape(std::span<const double> rows, size_t width,
                        std::span<double> out) {
  if (rows.size() != width * out.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("batch of ", rows.size(),
                                  " values does not hold ", out.size(),
                                  " rows of width ", width));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> PredictorModel::PredictOne(
    std::span<const double> encoded) const {
  double out = 0;
  POVEX_RETURN_IF_ERROR(
      PredictBatch(encoded, encoded.size(), std::span<double>(&out, 1)));
  return out;
}

absl::Status ConstantModel::PredictBatch(std::span<const double> rows,
                                         size_t width,
                                         std::span<double> out) const {
  POVEX_RETURN_IF_ERROR(CheckShape(rows, width, out));
  for (double& y : out) y = value_;
  return absl::OkStatus();
}

std::string ConstantModel::model_id() const {
  return absl::StrCat("constant:", HexDigest(Fnv1a64().F64(value_).digest()));
}

std::optional<json> ConstantModel::ToJson() const {
  return json{{"model_version", 1}, {"kind", "constant"}, {"value", value_}};
}

absl::Status LinearModel::PredictBatch(std::span<const double> rows,
                                       size_t width,
                                       std::span<double> out) const {
  POVEX_RETURN_IF_ERROR(CheckShape(rows, width, out));
  if (width != coefficients_.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("linear model expects width ",
                                  coefficients_.size(), ", got ", width));
  }
  for (size_t i = 0; i < out.size(); ++i) {
    double y = intercept_;
    const double* x = rows.data() + i * width;
    for (size_t c = 0; c < width; ++c) y += coefficients_[c] * x[c];
    out[i] = y;
  }
  return absl::OkStatus();
}

std::string LinearModel::model_id() const {
  Fnv1a64 h;
  h.Str("linear").F64(intercept_);
  for (const double b : coefficients_) h.F64(b);
  return absl::StrCat("linear:", HexDigest(h.digest()));
}

std::optional<json> LinearModel::ToJson() const {
  return json{{"model_version", 1},
              {"kind", "linear"},
              {"intercept", intercept_},
              {"coefficients", coefficients_},
              {"training_fingerprint", training_fingerprint_}};
}

absl::Status AffineModel::PredictBatch(std::span<const double> rows,
                                       size_t width,
                                       std::span<double> out) const {
  POVEX_RETURN_IF_ERROR(base_->PredictBatch(rows, width, out));
  for (double& y : out) y = scale_ * y + offset_;
  return absl::OkStatus();
}

std::string AffineModel::model_id() const {
  return absl::StrCat("affine(", scale_, ",", offset_, "):", base_->model_id());
}

absl::Status FunctionModel::PredictBatch(std::span<const double> rows,
                                         size_t width,
                                         std::span<double> out) const {
  POVEX_RETURN_IF_ERROR(CheckShape(rows, width, out));
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = fn_(rows.subspan(i * width, width));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Predict(const PredictorModel& model,
                               const PreprocessPipeline& pipeline,
                               const tabular::Household& raw) {
  POVEX_ASSIGN_OR_RETURN(std::vector<double> encoded, pipeline.Encode(raw));
  POVEX_ASSIGN_OR_RETURN(double y, model.PredictOne(encoded));
  if (!std::isfinite(y)) {
    return MakeError(ErrorKind::kProtocolError,
                     absl::StrCat("model returned non-finite prediction for `",
                                  raw.id, "`"));
  }
  return y;
}

absl::StatusOr<std::vector<double>> PredictBatch(
    const PredictorModel& model, const PreprocessPipeline& pipeline,
    std::span<const tabular::Household> raws) {
  const size_t width = pipeline.width();
  std::vector<double> encoded(raws.size() * width);
  for (size_t i = 0; i < raws.size(); ++i) {
    const absl::Status status = pipeline.Encode(
        raws[i].values, std::span<double>(encoded).subspan(i * width, width));
    if (!status.ok()) {
      return MakeError(GetErrorKind(status).value_or(ErrorKind::kEncodingError),
                       absl::StrCat("instance ", i, ": ", status.message()));
    }
  }
  std::vector<double> out(raws.size());
  POVEX_RETURN_IF_ERROR(model.PredictBatch(encoded, width, out));
  return out;
}

absl::Status PredictRawRows(const PredictorModel& model,
                            const PreprocessPipeline& pipeline,
                            std::span<const double> raw_rows,
                            std::span<double> out) {
  const size_t raw_width = pipeline.raw_width();
  const size_t width = pipeline.width();
  if (raw_rows.size() != raw_width * out.size()) {
    return MakeError(ErrorKind::kLengthMismatch, "raw batch shape mismatch");
  }
  std::vector<double> encoded(out.size() * width);
  for (size_t i = 0; i < out.size(); ++i) {
    const absl::Status status =
        pipeline.Encode(raw_rows.subspan(i * raw_width, raw_width),
                        std::span<double>(encoded).subspan(i * width, width));
    if (!status.ok()) {
      return MakeError(GetErrorKind(status).value_or(ErrorKind::kEncodingError),
                       absl::StrCat("instance ", i, ": ", status.message()));
    }
  }
  return model.PredictBatch(encoded, width, out);
}

}  // namespace povex::predictor
