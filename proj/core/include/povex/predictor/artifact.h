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

#ifndef POVEX_PREDICTOR_ARTIFACT_H_
#define POVEX_PREDICTOR_ARTIFACT_H_

#include <memory>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "povex/predictor/model.h"
#include "povex/predictor/pipeline.h"

namespace povex::predictor {

// A fitted model together with the pipeline it was trained on.
//
// File layout (JSON, `artifact_version: 1`):
//   {"artifact_version": 1, "pipeline": {...}, "model": {...}, "metrics": {...}}
// where "model" is one of
//   {"kind": "constant", "value": c}
//   {"kind": "linear", "intercept": b, "coefficients": [...]}
//   {"kind": "tree_ensemble", "base_score": b, "width": w, "trees": [...]}
//   {"kind": "external", "command": ["prog", "arg", ...]}
struct ModelArtifact {
  std::shared_ptr<const PredictorModel> model;
  PreprocessPipeline pipeline;
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json model_json;
};

absl::StatusOr<nlohmann::json> ArtifactToJson(const ModelArtifact& artifact);
absl::StatusOr<ModelArtifact> ArtifactFromJson(const nlohmann::json& json);

absl::Status SaveArtifact(const ModelArtifact& artifact, const std::string& path);
absl::StatusOr<ModelArtifact> LoadArtifact(const std::string& path);

// Writes via a sibling temp file and rename(2).
absl::Status WriteFileAtomically(const std::string& path,
                                 const std::string& contents);

}  // namespace povex::predictor

#endif  // POVEX_PREDICTOR_ARTIFACT_H_
