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

#include "povex/tabular/contrastive.h"

#include "absl/strings/str_cat.h"
#include "povex/status.h"

namespace povex::tabular {

absl::StatusOr<ContrastiveSet> FilterContrastive(const Dataset& dataset,
                                                 const PovertyConfig& config) {
  if (!(config.poverty_line > 0) || config.min_contrastive_rows < 1) {
    return MakeError(ErrorKind::kInvalidParams,
                     "poverty_line must be > 0 and min_contrastive_rows >= 1");
  }
  std::vector<size_t> rows;
  const auto income = dataset.income();
  for (size_t i = 0; i < income.size(); ++i) {
    if (income[i] < config.poverty_line) rows.push_back(i);
  }
  if (rows.size() < static_cast<size_t>(config.min_contrastive_rows)) {
    return MakeError(
        ErrorKind::kContrastiveSetTooSmall,
        absl::StrCat("only ", rows.size(), " households below poverty line ",
                     config.poverty_line, "; need at least ",
                     config.min_contrastive_rows));
  }
  Dataset subset = dataset.Subset(
      rows, absl::StrCat(dataset.source_tag(), "[income<",
                         config.poverty_line, "]"));
  return ContrastiveSet{std::move(subset), std::move(rows)};
}

}  // namespace povex::tabular
