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

#include "povex/predictor/pipeline.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "povex/hash.h"
#include "povex/status.h"

namespace povex::predictor {

using nlohmann::json;
using tabular::FeatureKind;
using tabular::IsMissing;

size_t FeatureEncoding::width() const {
  switch (step) {
    case EncodingStep::kPassthrough:
    case EncodingStep::kLog1p:
      return 1;
    case EncodingStep::kOneHot:
      return num_categories + 1;
    case EncodingStep::kQuantileBins:
      return cuts.size() + 1;
  }
  return 1;
}

namespace {

absl::string_view StepName(EncodingStep step) {
  switch (step) {
    case EncodingStep::kPassthrough:
      return "passthrough";
    case EncodingStep::kLog1p:
      return "log1p";
    case EncodingStep::kOneHot:
      return "one_hot";
    case EncodingStep::kQuantileBins:
      return "quantile_bins";
  }
  return "passthrough";
}

std::optional<EncodingStep> ParseStep(absl::string_view name) {
  for (const auto step : {EncodingStep::kPassthrough, EncodingStep::kLog1p,
                          EncodingStep::kOneHot, EncodingStep::kQuantileBins}) {
    if (StepName(step) == name) return step;
  }
  return std::nullopt;
}

}  // namespace

void PreprocessPipeline::BuildColumns(
    const std::vector<tabular::FeatureSchema>& features) {
  columns_.clear();
  feature_names_.clear();
  for (const auto& f : features) feature_names_.push_back(f.name);
  for (const auto& e : encodings_) {
    const auto source = static_cast<int>(e.feature);
    const std::string& name = feature_names_[e.feature];
    switch (e.step) {
      case EncodingStep::kPassthrough:
        columns_.push_back({name, source, false});
        break;
      case EncodingStep::kLog1p:
        columns_.push_back({absl::StrCat("log1p(", name, ")"), source, false});
        break;
      case EncodingStep::kOneHot:
        for (size_t c = 0; c < e.num_categories; ++c) {
          const auto& cats = features[e.feature].categories;
          columns_.push_back(
              {absl::StrCat(name, "=", c < cats.size() ? cats[c]
                                                       : std::to_string(c)),
               source, false});
        }
        columns_.push_back({absl::StrCat(name, "=<missing>"), source, false});
        break;
      case EncodingStep::kQuantileBins:
        for (size_t b = 0; b <= e.cuts.size(); ++b) {
          columns_.push_back({absl::StrCat(name, "#bin", b), source, false});
        }
        break;
    }
  }
  if (intercept_) columns_.push_back({"(intercept)", -1, true});
}

PreprocessPipeline PreprocessPipeline::Identity(
    const std::vector<tabular::FeatureSchema>& features) {
  PreprocessPipeline p;
  p.raw_width_ = features.size();
  for (size_t j = 0; j < features.size(); ++j) {
    p.encodings_.push_back({j, EncodingStep::kPassthrough, tabular::kMissing, 0, {}});
  }
  p.BuildColumns(features);
  return p;
}

absl::StatusOr<PreprocessPipeline> PreprocessPipeline::Fit(
    const tabular::Dataset& dataset, const Options& options) {
  PreprocessPipeline p;
  p.raw_width_ = dataset.num_features();
  p.intercept_ = options.intercept_column;
  auto contains = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const auto& name : options.log1p_features) {
    if (!dataset.FeatureIndex(name)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("unknown log1p feature `", name, "`"));
    }
  }
  for (const auto& [name, bins] : options.binned_features) {
    if (!dataset.FeatureIndex(name) || bins < 2) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("bad binned feature `", name, "`"));
    }
  }
  for (size_t j = 0; j < dataset.num_features(); ++j) {
    const auto& f = dataset.feature(j);
    FeatureEncoding e;
    e.feature = j;
    if (f.is_discrete() && options.one_hot_discrete) {
      e.step = EncodingStep::kOneHot;
      e.num_categories = f.categories.size();
      p.encodings_.push_back(e);
      continue;
    }
    std::vector<double> observed;
    for (const double v : dataset.column(j)) {
      if (!IsMissing(v)) observed.push_back(v);
    }
    if (options.impute_numeric_mean) {
      double sum = 0;
      for (const double v : observed) sum += v;
      e.impute = observed.empty() ? 0.0
                                  : sum / static_cast<double>(observed.size());
    }
    e.step = contains(options.log1p_features, f.name) ? EncodingStep::kLog1p
                                                      : EncodingStep::kPassthrough;
    if (const auto it = options.binned_features.find(f.name);
        it != options.binned_features.end()) {
      e.step = EncodingStep::kQuantileBins;
      std::sort(observed.begin(), observed.end());
      const size_t bins = static_cast<size_t>(it->second);
      for (size_t b = 1; b < bins && !observed.empty(); ++b) {
        const double cut = observed[b * observed.size() / bins];
        if (e.cuts.empty() || cut > e.cuts.back()) e.cuts.push_back(cut);
      }
    }
    p.encodings_.push_back(e);
  }
  p.BuildColumns(dataset.features());
  return p;
}

absl::Status PreprocessPipeline::Encode(std::span<const double> raw,
                                        std::span<double> out) const {
  if (raw.size() != raw_width_ || out.size() != width()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("pipeline expects ", raw_width_,
                                  " raw values and ", width(), " outputs"));
  }
  size_t c = 0;
  for (const auto& e : encodings_) {
    double x = raw[e.feature];
    auto domain_error = [&](absl::string_view what) {
      return MakeError(ErrorKind::kEncodingError,
                       absl::StrCat("feature `", feature_names_[e.feature],
                                    "`: ", what));
    };
    switch (e.step) {
      case EncodingStep::kPassthrough:
      case EncodingStep::kLog1p:
      case EncodingStep::kQuantileBins: {
        if (IsMissing(x)) {
          if (IsMissing(e.impute)) return domain_error("missing value");
          x = e.impute;
        }
        if (!std::isfinite(x)) return domain_error("non-finite value");
        if (e.step == EncodingStep::kPassthrough) {
          out[c++] = x;
        } else if (e.step == EncodingStep::kLog1p) {
          out[c++] = std::log1p(std::max(x, 0.0));
        } else {
          const size_t bin = static_cast<size_t>(
              std::upper_bound(e.cuts.begin(), e.cuts.end(), x) - e.cuts.begin());
          for (size_t b = 0; b <= e.cuts.size(); ++b) out[c++] = b == bin ? 1 : 0;
        }
        break;
      }
      case EncodingStep::kOneHot: {
        size_t hot = e.num_categories;
        if (!IsMissing(x)) {
          if (x < 0 || x >= static_cast<double>(e.num_categories) ||
              x != std::floor(x)) {
            return domain_error(absl::StrCat("category code ", x,
                                             " outside the declared domain"));
          }
          hot = static_cast<size_t>(x);
        }
        for (size_t k = 0; k <= e.num_categories; ++k) out[c++] = k == hot ? 1 : 0;
        break;
      }
    }
  }
  if (intercept_) out[c++] = 1.0;
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> PreprocessPipeline::Encode(
    const tabular::Household& household) const {
  std::vector<double> out(width());
  POVEX_RETURN_IF_ERROR(Encode(household.values, out));
  return out;
}

json PreprocessPipeline::ToJson() const {
  json steps = json::array();
  for (const auto& e : encodings_) {
    json step = {{"feature", feature_names_[e.feature]},
                 {"step", StepName(e.step)}};
    if (!IsMissing(e.impute)) step["impute"] = e.impute;
    if (e.step == EncodingStep::kOneHot) step["num_categories"] = e.num_categories;
    if (e.step == EncodingStep::kQuantileBins) step["cuts"] = e.cuts;
    steps.push_back(step);
  }
  json columns = json::array();
  for (const auto& col : columns_) columns.push_back(col.name);
  return {{"pipeline_version", 1},
          {"features", feature_names_},
          {"intercept_column", intercept_},
          {"steps", steps},
          {"columns", columns}};
}

absl::StatusOr<PreprocessPipeline> PreprocessPipeline::FromJson(const json& j) {
  try {
    if (j.at("pipeline_version").get<int>() != 1) {
      return MakeError(ErrorKind::kParseError, "unsupported pipeline_version");
    }
    PreprocessPipeline p;
    p.intercept_ = j.value("intercept_column", false);
    std::vector<tabular::FeatureSchema> features;
    for (const auto& name : j.at("features")) {
      tabular::FeatureSchema f;
      f.name = name.get<std::string>();
      features.push_back(f);
    }
    p.raw_width_ = features.size();
    for (const auto& step : j.at("steps")) {
      FeatureEncoding e;
      const std::string name = step.at("feature").get<std::string>();
      const auto it = std::find_if(features.begin(), features.end(),
                                   [&](const auto& f) { return f.name == name; });
      const auto kind = ParseStep(step.at("step").get<std::string>());
      if (it == features.end() || !kind) {
        return MakeError(ErrorKind::kParseError,
                         absl::StrCat("bad pipeline step for `", name, "`"));
      }
      e.feature = static_cast<size_t>(it - features.begin());
      e.step = *kind;
      if (step.contains("impute")) e.impute = step.at("impute").get<double>();
      e.num_categories = step.value("num_categories", size_t{0});
      if (step.contains("cuts")) e.cuts = step.at("cuts").get<std::vector<double>>();
      p.encodings_.push_back(e);
    }
    // Category labels are cosmetic; restore them from column names.
    const auto names = j.value("columns", std::vector<std::string>());
    size_t c = 0;
    for (const auto& e : p.encodings_) {
      if (e.step == EncodingStep::kOneHot) {
        auto& cats = features[e.feature].categories;
        const std::string prefix = features[e.feature].name + "=";
        for (size_t k = 0; k < e.num_categories && c + k < names.size(); ++k) {
          cats.push_back(names[c + k].substr(std::min(prefix.size(),
                                                      names[c + k].size())));
        }
      }
      c += e.width();
    }
    p.BuildColumns(features);
    return p;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kParseError, absl::StrCat("pipeline: ", e.what()));
  }
}

std::string PreprocessPipeline::Fingerprint() const {
  return HexDigest(Fnv1a64().Str(ToJson().dump()).digest());
}

absl::StatusOr<InterpretableEffects> EncodedToInterpretableEffects(
    std::span<const double> effects, const PreprocessPipeline& pipeline) {
  if (effects.size() != pipeline.width()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("expected ", pipeline.width(),
                                  " encoded effects, got ", effects.size()));
  }
  InterpretableEffects out;
  out.per_feature.assign(pipeline.raw_width(), 0.0);
  const auto& columns = pipeline.columns();
  for (size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].synthetic_intercept || columns[c].source_feature < 0) {
      out.dropped_columns.push_back(c);
      continue;
    }
    out.per_feature[static_cast<size_t>(columns[c].source_feature)] += effects[c];
  }
  return out;
}

}  // namespace povex::predictor
