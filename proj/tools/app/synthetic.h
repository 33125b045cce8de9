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

#ifndef POVEX_TOOLS_APP_SYNTHETIC_H_
#define POVEX_TOOLS_APP_SYNTHETIC_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"

namespace povex::app {

// Household survey with known income: linear in the features plus one
// schooling x formal-activity interaction plus Gaussian noise. Ships one
// conditionality rule: head_age (cuts 25/45/65) x formal_activity driving
// schooling, education, labor status, sector and pension.
struct SyntheticOptions {
  size_t rows = 5000;
  uint64_t seed = 1;
  double missing_rate = 0.02;
};

struct SyntheticSurvey {
  tabular::Schema schema;
  tabular::Dataset dataset;
};

inline constexpr double kSyntheticPovertyLine = 380.0;

tabular::Schema SyntheticSchema();
absl::StatusOr<SyntheticSurvey> GenerateSynthetic(const SyntheticOptions& options);

}  // namespace povex::app

#endif  // POVEX_TOOLS_APP_SYNTHETIC_H_
