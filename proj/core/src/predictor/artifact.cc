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

#include "povex/predictor/artifact.h"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "povex/predictor/external_model.h"
#include "povex/predictor/fit.h"
#include "povex/status.h"

namespace povex::predictor {

using nlohmann::json;

absl::StatusOr<json> ArtifactToJson(const ModelArtifact& artifact) {
  json model = artifact.model_json;
  if (model.is_null()) {
    const auto dumped = artifact.model->ToJson();
    if (!dumped) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("model ", artifact.model->model_id(),
                                    " cannot be persisted"));
    }
    model = *dumped;
  }
  return json{{"artifact_version", 1},
              {"pipeline", artifact.pipeline.ToJson()},
              {"model", model},
              {"metrics", artifact.metrics}};
}

absl::StatusOr<ModelArtifact> ArtifactFromJson(const json& root) {
  ModelArtifact artifact;
  try {
    if (root.value("artifact_version", 0) != 1) {
      return MakeError(ErrorKind::kParseError, "unsupported artifact_version");
    }
    POVEX_ASSIGN_OR_RETURN(artifact.pipeline,
                           PreprocessPipeline::FromJson(root.at("pipeline")));
    const json& m = root.at("model");
    artifact.model_json = m;
    artifact.metrics = root.value("metrics", json::object());
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "constant") {
      artifact.model = std::make_shared<ConstantModel>(m.at("value").get<double>());
    } else if (kind == "linear") {
      auto coefficients = m.at("coefficients").get<std::vector<double>>();
      if (coefficients.size() != artifact.pipeline.width()) {
        return MakeError(ErrorKind::kParseError,
                         "linear coefficients do not match the pipeline width");
      }
      artifact.model = std::make_shared<LinearModel>(
          std::move(coefficients), m.at("intercept").get<double>(),
          m.value("training_fingerprint", std::string()));
    } else if (kind == "tree_ensemble") {
      std::vector<std::vector<TreeNode>> trees;
      const auto width = m.at("width").get<size_t>();
      for (const auto& t : m.at("trees")) {
        std::vector<TreeNode> nodes;
        for (const auto& n : t) {
          TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(),
                        n.at(2).get<int>(), n.at(3).get<int>(),
                        n.at(4).get<double>()};
          nodes.push_back(node);
        }
        for (const auto& node : nodes) {
          const auto size = static_cast<int>(nodes.size());
          if (node.feature >= static_cast<int>(width) ||
              (node.feature >= 0 &&
               (node.left <= 0 || node.left >= size || node.right <= 0 ||
                node.right >= size))) {
            return MakeError(ErrorKind::kParseError, "malformed tree node");
          }
        }
        if (nodes.empty()) return MakeError(ErrorKind::kParseError, "empty tree");
        trees.push_back(std::move(nodes));
      }
      artifact.model = std::make_shared<TreeEnsembleModel>(
          m.at("base_score").get<double>(), std::move(trees), width,
          m.value("training_fingerprint", std::string()));
    } else if (kind == "external") {
      POVEX_ASSIGN_OR_RETURN(
          auto external,
          ExternalModel::Start(m.at("command").get<std::vector<std::string>>()));
      artifact.model = std::shared_ptr<const PredictorModel>(std::move(external));
    } else {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("unknown model kind `", kind, "`"));
    }
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kParseError, absl::StrCat("artifact: ", e.what()));
  }
  return artifact;
}

absl::Status WriteFileAtomically(const std::string& path,
                                 const std::string& contents) {
  const std::string tmp = absl::StrCat(path, ".tmp.", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return MakeError(ErrorKind::kIo, absl::StrCat("cannot write ", tmp));
    }
    out << contents;
    out.flush();
    if (!out) return MakeError(ErrorKind::kIo, absl::StrCat("short write to ", tmp));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    return MakeError(ErrorKind::kIo, absl::StrCat("cannot rename onto ", path));
  }
  return absl::OkStatus();
}

absl::Status SaveArtifact(const ModelArtifact& artifact, const std::string& path) {
  POVEX_ASSIGN_OR_RETURN(json root, ArtifactToJson(artifact));
  return WriteFileAtomically(path, root.dump(2) + "\n");
}

absl::StatusOr<ModelArtifact> LoadArtifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kIo, absl::StrCat("cannot open model file ", path));
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kParseError, absl::StrCat(path, ": ", e.what()));
  }
  return ArtifactFromJson(root);
}

}  // namespace povex::predictor
