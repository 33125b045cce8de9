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

#include "povex/engine/engine.h"

#include <cmath>
#include <map>
#include <tuple>
#include <utility>

#include "absl/strings/str_cat.h"
#include "povex/engine/parallel.h"
#include "povex/hash.h"
#include "povex/status.h"
#include "povex/tabular/contrastive.h"

namespace povex::engine {

using tabular::ConditionalSampler;
using tabular::Dataset;
using tabular::Household;
using tabular::ResampleTrace;

absl::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kUnivariate:
      return "univariate";
    case Algorithm::kConditional:
      return "conditional";
    case Algorithm::kBivariate:
      return "bivariate";
    case Algorithm::kContrastive:
      return "contrastive";
  }
  return "unknown";
}

absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name) {
  if (name == "uni" || name == "univariate") return Algorithm::kUnivariate;
  if (name == "cond" || name == "conditional") return Algorithm::kConditional;
  if (name == "biv" || name == "bivariate") return Algorithm::kBivariate;
  if (name == "contrastive") return Algorithm::kContrastive;
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown algorithm `", name,
                                "` (expected uni, cond, biv or contrastive)"));
}

std::string ConfigFingerprint(absl::string_view context, Algorithm algorithm,
                              int max_bins, uint64_t seed, int resamples,
                              std::optional<double> poverty_line) {
  Fnv1a64 h;
  h.Str("povex-config-v1").Str(context).Str(AlgorithmName(algorithm));
  h.U64(static_cast<uint64_t>(max_bins)).U64(seed);
  h.U64(static_cast<uint64_t>(resamples));
  if (poverty_line) {
    h.U64(1).F64(*poverty_line);
  } else {
    h.U64(0);
  }
  return HexDigest(h.digest());
}

absl::StatusOr<PerturbationEngine> PerturbationEngine::Create(
    const Dataset& reference,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    std::vector<tabular::ConditionalityRule> rules, Options options) {
  if (!model) return MakeError(ErrorKind::kInvalidArgument, "null model");
  if (options.max_bins < 2) {
    return MakeError(ErrorKind::kInvalidParams, "max_bins must be at least 2");
  }
  const size_t d = reference.num_features();
  if (pipeline.raw_width() != d) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("pipeline expects ", pipeline.raw_width(),
                                  " raw features, dataset has ", d));
  }
  POVEX_RETURN_IF_ERROR(tabular::ValidateRules(rules, reference.features()));

  PerturbationEngine engine;
  engine.model_ = std::move(model);
  engine.pipeline_ = pipeline;
  engine.options_ = options;
  for (const auto& f : reference.features()) {
    engine.feature_names_.push_back(f.name);
  }
  POVEX_ASSIGN_OR_RETURN(ConditionalSampler sampler,
                         ConditionalSampler::Create(reference, std::move(rules)));
  engine.sampler_ = std::make_shared<const ConditionalSampler>(std::move(sampler));

  engine.marginals_.reserve(d);
  engine.diagonal_entries_.resize(d);
  for (size_t j = 0; j < d; ++j) {
    POVEX_ASSIGN_OR_RETURN(auto vs,
                           tabular::ComputeValueSet(reference, j, options.max_bins));
    for (size_t v = 0; v < vs.size(); ++v) {
      engine.diagonal_entries_[j].push_back({v, v, vs.weights[v]});
    }
    engine.marginals_.push_back(std::move(vs));
  }
  engine.joints_.reserve(d * (d - 1) / 2);
  engine.pair_entries_.reserve(d * (d - 1) / 2);
  for (size_t j = 0; j < d; ++j) {
    for (size_t k = j + 1; k < d; ++k) {
      auto joint = tabular::ComputeJointValueSet(reference, engine.marginals_[j],
                                                 engine.marginals_[k]);
      std::vector<Entry> entries;
      entries.reserve(joint.size());
      for (size_t p = 0; p < joint.size(); ++p) {
        entries.push_back(
            {joint.pairs[p].first, joint.pairs[p].second, joint.weights[p]});
      }
      engine.joints_.push_back(std::move(joint));
      engine.pair_entries_.push_back(std::move(entries));
    }
  }
  return engine;
}

size_t PerturbationEngine::PairSlot(size_t j, size_t k) const {
  if (j > k) std::swap(j, k);
  const size_t d = marginals_.size();
  return j * d - j * (j + 1) / 2 + (k - j - 1);
}

const tabular::JointValueSet& PerturbationEngine::joint_value_set(
    size_t j, size_t k) const {
  return joints_[PairSlot(j, k)];
}

uint64_t PerturbationEngine::EstimateEvaluations(Algorithm algorithm,
                                                 int resamples) const {
  const uint64_t r =
      (algorithm == Algorithm::kUnivariate || sampler_->empty())
          ? 1
          : static_cast<uint64_t>(std::max(resamples, 1));
  uint64_t total = 0;
  for (const auto& vs : marginals_) total += vs.size();
  if (algorithm == Algorithm::kBivariate ||
      algorithm == Algorithm::kContrastive) {
    for (const auto& joint : joints_) total += joint.size();
  }
  return total * r;
}

absl::Status PerturbationEngine::EvaluateItem(
    const WorkItem& item, std::span<const double> focal, double predicted,
    std::span<const std::optional<size_t>> own, bool conditional,
    const ExplainConfig& config, ItemResult* result) const {
  const size_t d = focal.size();
  const bool observe = static_cast<bool>(config.observer);
  const int resamples = config.resamples;

  struct Planned {
    PerturbationRecord record;
    size_t first_row = 0;  // into `rows`
    int reps = 0;          // 0 for the self record
  };
  std::vector<Planned> plan;
  plan.reserve(item.entries.size());
  std::vector<double> rows;
  std::vector<ResampleTrace> traces;
  ResampleTrace shared_trace;
  std::vector<double> values(focal.begin(), focal.end());
  size_t changed[2];

  for (const Entry& e : item.entries) {
    Planned p;
    p.record.first = item.first;
    p.record.second = item.second;
    p.record.first_index = e.first_index;
    p.record.second_index = e.second_index;
    p.record.first_value = marginals_[item.first].values[e.first_index];
    p.record.second_value = marginals_[item.second].values[e.second_index];
    p.record.weight = e.weight;

    std::copy(focal.begin(), focal.end(), values.begin());
    size_t num_changed = 0;
    if (own[item.first] != e.first_index) {
      values[item.first] = p.record.first_value;
      changed[num_changed++] = item.first;
    }
    if (item.second != item.first && own[item.second] != e.second_index) {
      values[item.second] = p.record.second_value;
      changed[num_changed++] = item.second;
    }
    if (num_changed == 0) {
      p.record.self = true;
      plan.push_back(p);
      continue;
    }
    const std::span<const size_t> perturbed(changed, num_changed);
    const bool triggered = conditional && sampler_->Triggers(perturbed);
    p.reps = triggered ? resamples : 1;
    p.first_row = rows.size() / d;
    for (int r = 0; r < p.reps; ++r) {
      const size_t offset = rows.size();
      rows.insert(rows.end(), values.begin(), values.end());
      ResampleTrace* trace = &shared_trace;
      if (observe) trace = &traces.emplace_back();
      if (triggered) {
        const uint64_t seed = DeriveSeed(
            config.seed, {item.first, item.second, e.first_index,
                          e.second_index, static_cast<uint64_t>(r)});
        sampler_->Resample(std::span<double>(rows).subspan(offset, d),
                           perturbed, seed, trace);
      }
    }
    plan.push_back(p);
  }

  const size_t count = rows.size() / d;
  std::vector<double> out(count);
  if (count > 0) {
    POVEX_RETURN_IF_ERROR(
        predictor::PredictRawRows(*model_, pipeline_, rows, out));
  }
  for (size_t i = 0; i < count; ++i) {
    out[i] = predicted - out[i];
    if (!std::isfinite(out[i])) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "model returned a non-finite prediction");
    }
  }
  result->evaluations = count;

  double sum = 0;
  for (Planned& p : plan) {
    if (p.record.self) {
      if (observe) config.observer(p.record, focal, ResampleTrace());
      continue;
    }
    double delta = out[p.first_row];
    for (int r = 1; r < p.reps; ++r) delta += out[p.first_row + r];
    if (p.reps > 1) delta /= p.reps;
    sum += p.record.weight * delta;
    if (observe) {
      for (int r = 0; r < p.reps; ++r) {
        const size_t row = p.first_row + r;
        p.record.resample = r;
        p.record.delta = out[row];
        config.observer(p.record,
                        std::span<const double>(rows).subspan(row * d, d),
                        traces[row]);
      }
    }
  }
  result->sum = sum;
  if (observe) {
    for (auto& t : traces) {
      result->warnings.insert(result->warnings.end(), t.warnings.begin(),
                              t.warnings.end());
    }
  } else {
    result->warnings = std::move(shared_trace.warnings);
  }
  return absl::OkStatus();
}

absl::StatusOr<ImportanceVector> PerturbationEngine::Explain(
    Algorithm algorithm, const Household& focal,
    const ExplainConfig& config) const {
  const size_t d = marginals_.size();
  if (focal.values.size() != d) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("focal household has ", focal.values.size(),
                                  " values, expected ", d));
  }
  if (algorithm == Algorithm::kContrastive && !options_.poverty_line) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "contrastive explanations need an engine over the "
                     "contrast set");
  }
  if (config.resamples < 1) {
    return MakeError(ErrorKind::kInvalidParams, "resamples must be at least 1");
  }
  const uint64_t needed = EstimateEvaluations(algorithm, config.resamples);
  if (needed > config.budget) {
    return MakeError(ErrorKind::kBudgetExceeded,
                     absl::StrCat("explanation needs ", needed,
                                  " model evaluations, above the budget of ",
                                  config.budget));
  }

  double predicted = 0;
  POVEX_RETURN_IF_ERROR(predictor::PredictRawRows(
      *model_, pipeline_, focal.values, std::span<double>(&predicted, 1)));
  if (!std::isfinite(predicted)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "model returned a non-finite prediction");
  }

  std::vector<std::optional<size_t>> own(d);
  for (size_t j = 0; j < d; ++j) own[j] = marginals_[j].IndexOf(focal.values[j]);

  const bool pairs = algorithm == Algorithm::kBivariate ||
                     algorithm == Algorithm::kContrastive;
  const bool conditional = algorithm != Algorithm::kUnivariate;
  std::vector<WorkItem> items;
  items.reserve(pairs ? d * (d + 1) / 2 : d);
  for (size_t j = 0; j < d; ++j) {
    items.push_back({j, j, diagonal_entries_[j]});
    if (!pairs) continue;
    for (size_t k = j + 1; k < d; ++k) {
      items.push_back({j, k, pair_entries_[PairSlot(j, k)]});
    }
  }

  std::vector<ItemResult> results(items.size());
  POVEX_RETURN_IF_ERROR(ParallelFor(items.size(), config.workers, [&](size_t i) {
    return EvaluateItem(items[i], focal.values, predicted, own, conditional,
                        config, &results[i]);
  }));

  ImportanceVector iv;
  iv.values.assign(d, 0.0);
  iv.focal_id = focal.id;
  iv.algorithm = algorithm;
  iv.predicted_income = predicted;
  iv.max_bins = options_.max_bins;
  iv.seed = config.seed;
  iv.resamples = config.resamples;
  if (algorithm == Algorithm::kContrastive) iv.poverty_line = options_.poverty_line;
  iv.fingerprint =
      ConfigFingerprint(config.context, algorithm, iv.max_bins, iv.seed,
                        iv.resamples, iv.poverty_line);

  if (!pairs) {
    for (size_t j = 0; j < d; ++j) iv.values[j] = results[j].sum;
  } else {
    // Item index of (j, k), j <= k, in the enumeration above.
    std::vector<size_t> item_of(d * d);
    for (size_t i = 0; i < items.size(); ++i) {
      item_of[items[i].first * d + items[i].second] = i;
      item_of[items[i].second * d + items[i].first] = i;
    }
    for (size_t j = 0; j < d; ++j) {
      double acc = results[item_of[j * d]].sum;
      for (size_t k = 1; k < d; ++k) acc += results[item_of[j * d + k]].sum;
      iv.values[j] = acc / static_cast<double>(d);
    }
  }

  std::map<std::tuple<int, size_t, size_t>, uint64_t> tally;
  for (const auto& r : results) {
    iv.evaluations += r.evaluations;
    for (const auto& w : r.warnings) {
      ++tally[{static_cast<int>(w.code), w.rule, w.feature}];
    }
  }
  for (const auto& [key, n] : tally) {
    const auto [code, rule, feature] = key;
    iv.warnings.push_back(
        {std::string(tabular::ResampleWarningName(
             static_cast<tabular::ResampleWarning::Code>(code))),
         sampler_->rules()[rule].name, feature, feature_names_[feature], n});
  }
  return iv;
}

absl::StatusOr<PerturbationEngine> MakeEngine(
    Algorithm algorithm, const Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline,
    const std::vector<tabular::ConditionalityRule>& rules,
    const tabular::PovertyConfig& poverty, int max_bins) {
  PerturbationEngine::Options options;
  options.max_bins = max_bins;
  std::vector<tabular::ConditionalityRule> used;
  if (algorithm != Algorithm::kUnivariate) used = rules;
  if (algorithm == Algorithm::kContrastive) {
    POVEX_ASSIGN_OR_RETURN(auto contrast,
                           tabular::FilterContrastive(dataset, poverty));
    options.poverty_line = poverty.poverty_line;
    return PerturbationEngine::Create(contrast.rows, std::move(model), pipeline,
                                      std::move(used), options);
  }
  return PerturbationEngine::Create(dataset, std::move(model), pipeline,
                                    std::move(used), options);
}

namespace {

absl::StatusOr<ImportanceVector> Run(
    Algorithm algorithm, const Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline, const Household& focal,
    const std::vector<tabular::ConditionalityRule>& rules,
    const tabular::PovertyConfig& poverty, int max_bins,
    const ExplainConfig& config) {
  POVEX_ASSIGN_OR_RETURN(auto engine,
                         MakeEngine(algorithm, dataset, std::move(model),
                                    pipeline, rules, poverty, max_bins));
  return engine.Explain(algorithm, focal, config);
}

}  // namespace

absl::StatusOr<ImportanceVector> UnivariateImportances(
    const Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline, const Household& focal,
    int max_bins, const ExplainConfig& config) {
  return Run(Algorithm::kUnivariate, dataset, std::move(model), pipeline, focal,
             {}, {}, max_bins, config);
}

absl::StatusOr<ImportanceVector> ConditionalUnivariateImportances(
    const Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline, const Household& focal,
    const std::vector<tabular::ConditionalityRule>& rules, int max_bins,
    const ExplainConfig& config) {
  return Run(Algorithm::kConditional, dataset, std::move(model), pipeline,
             focal, rules, {}, max_bins, config);
}

absl::StatusOr<ImportanceVector> BivariateImportances(
    const Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline, const Household& focal,
    const std::vector<tabular::ConditionalityRule>& rules, int max_bins,
    const ExplainConfig& config) {
  return Run(Algorithm::kBivariate, dataset, std::move(model), pipeline, focal,
             rules, {}, max_bins, config);
}

absl::StatusOr<ImportanceVector> ContrastiveImportances(
    const Dataset& dataset,
    std::shared_ptr<const predictor::PredictorModel> model,
    const predictor::PreprocessPipeline& pipeline, const Household& focal,
    const std::vector<tabular::ConditionalityRule>& rules,
    const tabular::PovertyConfig& poverty, int max_bins,
    const ExplainConfig& config) {
  return Run(Algorithm::kContrastive, dataset, std::move(model), pipeline,
             focal, rules, poverty, max_bins, config);
}

}  // namespace povex::engine
