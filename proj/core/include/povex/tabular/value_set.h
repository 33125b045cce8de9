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

#ifndef POVEX_TABULAR_VALUE_SET_H_
#define POVEX_TABULAR_VALUE_SET_H_

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "povex/tabular/dataset.h"

namespace povex::tabular {

inline constexpr int kDefaultMaxBins = 16;

// Replacement values V_j of one feature with their empirical proportions
// w_j(v). Values are ascending with the missing category (if any) last.
//
// Numeric columns with more than `max_bins` distinct values are quantile
// binned: each entry is then the lower median of a bin of tied-together
// observed values, and [lower[i], upper[i]] is that bin's observed range.
// For unbinned entries lower == upper == value.
struct ValueSet {
  size_t feature_index = 0;
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<size_t> counts;
  bool binned = false;

  size_t size() const { return values.size(); }

  // Entry whose bin contains `x` (for discrete features: equal value).
  std::optional<size_t> IndexOf(double x) const;
};

// Joint empirical proportions w_{j,k} over rows observed in both columns,
// restricted to pairs with positive mass. Pairs refer to entries of the two
// marginal value sets and are in lexicographic order.
struct JointValueSet {
  size_t first_feature = 0;
  size_t second_feature = 0;
  std::vector<std::pair<size_t, size_t>> pairs;
  std::vector<double> weights;
  std::vector<size_t> counts;

  size_t size() const { return pairs.size(); }
};

absl::StatusOr<ValueSet> ComputeValueSet(const Dataset& dataset, size_t j,
                                         int max_bins = kDefaultMaxBins);

// Uses precomputed marginals of j and k.
JointValueSet ComputeJointValueSet(const Dataset& dataset,
                                   const ValueSet& first,
                                   const ValueSet& second);

absl::StatusOr<JointValueSet> ComputeJointValueSet(
    const Dataset& dataset, size_t j, size_t k, int max_bins = kDefaultMaxBins);

}  // namespace povex::tabular

#endif  // POVEX_TABULAR_VALUE_SET_H_
