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

#ifndef POVEX_PREDICTOR_FIT_H_
#define POVEX_PREDICTOR_FIT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "povex/predictor/model.h"
#include "povex/predictor/pipeline.h"
#include "povex/tabular/dataset.h"

namespace povex::predictor {

inline constexpr double kRidgeFallback = 1e-8;

struct LinearFitOptions {
  // Ridge penalty on the (centered) slopes; the intercept is never penalized.
  double ridge = 0.0;
  // On a rank-deficient design with ridge == 0, refit with kRidgeFallback
  // instead of failing with DegenerateDesign.
  bool ridge_fallback = true;
};

absl::StatusOr<LinearModel> FitLinear(const tabular::Dataset& dataset,
                                      const PreprocessPipeline& pipeline,
                                      const LinearFitOptions& options = {});

// Flat regression tree over encoded columns: x[feature] <= threshold goes left.
struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;
};

class TreeEnsembleModel final : public PredictorModel {
 public:
  TreeEnsembleModel(double base_score, std::vector<std::vector<TreeNode>> trees,
                    size_t width, std::string training_fingerprint = {});

  absl::Status PredictBatch(std::span<const double> rows, size_t width,
                            std::span<double> out) const override;
  std::string model_id() const override;
  std::string training_fingerprint() const override {
    return training_fingerprint_;
  }
  std::optional<nlohmann::json> ToJson() const override;

  size_t num_trees() const { return trees_.size(); }
  double base_score() const { return base_score_; }

  double PredictRow(const double* x) const;

 private:
  double base_score_;
  std::vector<std::vector<TreeNode>> trees_;
  size_t width_;
  std::string training_fingerprint_;
};

struct TreeEnsembleParams {
  int trees = 100;
  int max_depth = 6;
  double learning_rate = 0.1;
  // Fraction of rows sampled without replacement to grow each tree's
  // structure. Leaf values are then fitted on every training row.
  double bag_fraction = 1.0;
  int min_leaf_rows = 5;
  int histogram_bins = 64;
  uint64_t seed = 0;
};

// Squared-loss gradient boosting from the mean. Deterministic given the seed;
// every tree moves each leaf's rows a fraction of the way to their mean
// residual, so training MSE never exceeds the variance of Y.
absl::StatusOr<TreeEnsembleModel> FitTreeEnsemble(
    const tabular::Dataset& dataset, const PreprocessPipeline& pipeline,
    const TreeEnsembleParams& params = {});

}  // namespace povex::predictor

#endif  // POVEX_PREDICTOR_FIT_H_
