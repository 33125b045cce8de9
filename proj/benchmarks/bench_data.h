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

#ifndef POVEX_BENCHMARKS_BENCH_DATA_H_
#define POVEX_BENCHMARKS_BENCH_DATA_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "povex/predictor/fit.h"
#include "povex/predictor/model.h"
#include "povex/predictor/pipeline.h"
#include "povex/tabular/conditional.h"
#include "tools/app/synthetic.h"

namespace povex::bench {

struct BenchSurvey {
  tabular::Schema schema;
  tabular::Dataset dataset;
  std::vector<tabular::ConditionalityRule> rules;
  predictor::PreprocessPipeline pipeline;
  std::shared_ptr<const predictor::PredictorModel> linear;
  std::shared_ptr<const predictor::PredictorModel> trees;
};

template <typename T>
T OrDie(absl::StatusOr<T> v) {
  if (!v.ok()) throw std::runtime_error(std::string(v.status().message()));
  return std::move(*v);
}

// 5000 synthetic households, a linear fit and 100 trees of depth 6.
inline const BenchSurvey& Survey() {
  static const BenchSurvey survey = [] {
    auto s = OrDie(app::GenerateSynthetic({}));
    BenchSurvey b{s.schema, s.dataset, {}, {}, nullptr, nullptr};
    b.rules = OrDie(tabular::ResolveRules(s.schema.conditionalities,
                                          s.dataset.features(),
                                          s.schema.missing_sentinel));
    b.pipeline = OrDie(predictor::PreprocessPipeline::Fit(s.dataset));
    b.linear = std::make_shared<predictor::LinearModel>(
        OrDie(predictor::FitLinear(s.dataset, b.pipeline)));
    b.trees = std::make_shared<predictor::TreeEnsembleModel>(
        OrDie(predictor::FitTreeEnsemble(s.dataset, b.pipeline, {})));
    return b;
  }();
  return survey;
}

}  // namespace povex::bench

#endif  // POVEX_BENCHMARKS_BENCH_DATA_H_
