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

#include "tools/app/context.h"

#include "absl/strings/str_cat.h"
#include "povex/hash.h"
#include "povex/predictor/model.h"
#include "povex/status.h"

namespace povex::app {

absl::StatusOr<std::unique_ptr<ExplainContext>> ExplainContext::Load(
    const std::string& data_path, const std::string& schema_path,
    const std::string& model_path, const ExplainSettings& settings) {
  POVEX_ASSIGN_OR_RETURN(auto schema, tabular::LoadSchema(schema_path));
  POVEX_ASSIGN_OR_RETURN(auto dataset, tabular::LoadDataset(data_path, schema));
  POVEX_ASSIGN_OR_RETURN(auto artifact, predictor::LoadArtifact(model_path));
  return Create(std::move(schema), std::move(dataset), std::move(artifact),
                settings);
}

absl::StatusOr<std::unique_ptr<ExplainContext>> ExplainContext::Create(
    tabular::Schema schema, tabular::Dataset dataset,
    predictor::ModelArtifact artifact, const ExplainSettings& settings) {
  if (artifact.pipeline.raw_width() != dataset.num_features()) {
    return MakeError(ErrorKind::kSchemaMismatch,
                     absl::StrCat("model pipeline expects ",
                                  artifact.pipeline.raw_width(),
                                  " features, dataset has ",
                                  dataset.num_features()));
  }
  std::unique_ptr<ExplainContext> ctx(new ExplainContext());
  POVEX_ASSIGN_OR_RETURN(
      ctx->rules_, tabular::ResolveRules(schema.conditionalities,
                                         dataset.features(),
                                         schema.missing_sentinel));
  POVEX_ASSIGN_OR_RETURN(
      ctx->groups_, groups::GroupsFromSchema(dataset.features(), schema.groups));
  ctx->poverty_ = schema.poverty;
  if (settings.poverty_line) ctx->poverty_.poverty_line = *settings.poverty_line;
  if (!(ctx->poverty_.poverty_line > 0)) {
    return MakeError(ErrorKind::kInvalidParams, "poverty line must be positive");
  }
  ctx->provenance_.dataset_hash = HexDigest(dataset.ContentHash());
  ctx->provenance_.model_id = artifact.model->model_id();
  Fnv1a64 schema_hash;
  schema_hash.Str(tabular::SchemaToJson(schema).dump());
  ctx->context_tag_ = absl::StrCat(
      "dataset=", ctx->provenance_.dataset_hash,
      ";schema=", HexDigest(schema_hash.digest()),
      ";model=", ctx->provenance_.model_id,
      ";pipeline=", artifact.pipeline.Fingerprint());
  ctx->schema_ = std::move(schema);
  ctx->dataset_ = std::move(dataset);
  ctx->artifact_ = std::move(artifact);
  ctx->settings_ = settings;
  return ctx;
}

std::string ExplainContext::Fingerprint(engine::Algorithm algorithm,
                                        uint64_t seed) const {
  std::optional<double> line;
  if (algorithm == engine::Algorithm::kContrastive) line = poverty_.poverty_line;
  return engine::ConfigFingerprint(context_tag_, algorithm, settings_.bins,
                                   seed, settings_.resamples, line);
}

absl::StatusOr<const engine::PerturbationEngine*> ExplainContext::Engine(
    engine::Algorithm algorithm) const {
  Slot& slot = engines_[static_cast<size_t>(algorithm)];
  std::call_once(slot.once, [&] {
    slot.engine = engine::MakeEngine(algorithm, *dataset_, artifact_.model,
                                     artifact_.pipeline, rules_, poverty_,
                                     settings_.bins);
  });
  if (!slot.engine.ok()) return slot.engine.status();
  return &*slot.engine;
}

absl::StatusOr<engine::ImportanceVector> ExplainContext::Explain(
    size_t row, engine::Algorithm algorithm, uint64_t seed) const {
  if (row >= dataset_->num_rows()) {
    return MakeError(ErrorKind::kNotFound, absl::StrCat("no row ", row));
  }
  POVEX_ASSIGN_OR_RETURN(const auto* eng, Engine(algorithm));
  engine::ExplainConfig config;
  config.seed = seed;
  config.resamples = settings_.resamples;
  config.budget = settings_.budget;
  config.workers = settings_.workers;
  config.context = context_tag_;
  return eng->Explain(algorithm, dataset_->Row(row), config);
}

absl::StatusOr<nlohmann::json> ExplainContext::Report(
    size_t row, engine::Algorithm algorithm, uint64_t seed,
    const groups::ContrastiveDistribution* distribution) const {
  POVEX_ASSIGN_OR_RETURN(auto iv, Explain(row, algorithm, seed));
  if (algorithm != engine::Algorithm::kContrastive) distribution = nullptr;
  return BuildReport(iv, dataset_->Row(row), dataset_->features(), groups_,
                     distribution, provenance_);
}

absl::StatusOr<groups::ContrastiveDistribution>
ExplainContext::BuildDistribution(uint64_t seed,
                                  const std::string& built_at) const {
  groups::DistributionOptions options;
  options.max_bins = settings_.bins;
  options.explain.seed = seed;
  options.explain.resamples = settings_.resamples;
  options.explain.budget = settings_.budget;
  options.explain.workers = settings_.workers;
  options.explain.context = context_tag_;
  options.built_at = built_at;
  return groups::BuildContrastiveDistribution(
      *dataset_, artifact_.model, artifact_.pipeline, rules_, poverty_, groups_,
      options);
}

absl::StatusOr<std::vector<double>> ExplainContext::PredictAll() const {
  const size_t n = dataset_->num_rows();
  const size_t d = dataset_->num_features();
  std::vector<double> raw(n * d);
  for (size_t j = 0; j < d; ++j) {
    const auto column = dataset_->column(j);
    for (size_t i = 0; i < n; ++i) raw[i * d + j] = column[i];
  }
  std::vector<double> out(n);
  POVEX_RETURN_IF_ERROR(predictor::PredictRawRows(*artifact_.model,
                                                  artifact_.pipeline, raw, out));
  return out;
}

}  // namespace povex::app
