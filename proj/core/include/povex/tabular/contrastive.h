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

#ifndef POVEX_TABULAR_CONTRASTIVE_H_
#define POVEX_TABULAR_CONTRASTIVE_H_

#include <vector>

#include "absl/status/statusor.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"

namespace povex::tabular {

struct ContrastiveSet {
  Dataset rows;                       // X_p
  std::vector<size_t> source_rows;    // indices into the unfiltered dataset
  size_t cardinality() const { return source_rows.size(); }
};

// Keeps rows with income strictly below the poverty line. Fails with
// ContrastiveSetTooSmall when fewer than min_contrastive_rows remain.
absl::StatusOr<ContrastiveSet> FilterContrastive(const Dataset& dataset,
                                                 const PovertyConfig& config);

}  // namespace povex::tabular

#endif  // POVEX_TABULAR_CONTRASTIVE_H_
