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

#include "povex/tabular/value_set.h"

#include <algorithm>
#include <map>

#include "absl/strings/str_cat.h"
#include "povex/status.h"

namespace povex::tabular {

std::optional<size_t> ValueSet::IndexOf(double x) const {
  if (IsMissing(x)) {
    if (!values.empty() && IsMissing(values.back())) return values.size() - 1;
    return std::nullopt;
  }
  size_t end = values.size();
  if (end > 0 && IsMissing(values.back())) --end;
  // First bin whose upper bound is >= x.
  const auto it = std::lower_bound(upper.begin(), upper.begin() + end, x);
  if (it == upper.begin() + end) return std::nullopt;
  const size_t i = static_cast<size_t>(it - upper.begin());
  if (x < lower[i]) return std::nullopt;
  return i;
}

absl::StatusOr<ValueSet> ComputeValueSet(const Dataset& dataset, size_t j,
                                         int max_bins) {
  if (j >= dataset.num_features()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("feature index ", j, " out of range"));
  }
  if (max_bins < 2) {
    return MakeError(ErrorKind::kInvalidParams, "max_bins must be >= 2");
  }
  const auto column = dataset.column(j);
  const bool discrete = dataset.feature(j).is_discrete();

  std::vector<double> sorted;
  sorted.reserve(column.size());
  size_t missing = 0;
  for (const double v : column) {
    if (IsMissing(v)) {
      ++missing;
    } else {
      sorted.push_back(v);
    }
  }
  const size_t total = sorted.size() + (discrete ? missing : 0);
  if (total == 0) {
    return MakeError(ErrorKind::kAllMissingColumn,
                     absl::StrCat("feature `", dataset.feature(j).name,
                                  "` has no non-missing values"));
  }
  std::sort(sorted.begin(), sorted.end());

  // Runs of equal values: [start, end).
  std::vector<std::pair<size_t, size_t>> runs;
  for (size_t i = 0; i < sorted.size();) {
    size_t e = i + 1;
    while (e < sorted.size() && sorted[e] == sorted[i]) ++e;
    runs.emplace_back(i, e);
    i = e;
  }

  ValueSet out;
  out.feature_index = j;
  auto add = [&](double value, double lo, double hi, size_t count) {
    out.values.push_back(value);
    out.lower.push_back(lo);
    out.upper.push_back(hi);
    out.counts.push_back(count);
  };

  const size_t bins = static_cast<size_t>(max_bins);
  if (discrete || runs.size() <= bins) {
    for (const auto& [s, e] : runs) add(sorted[s], sorted[s], sorted[s], e - s);
  } else {
    // Quantile bins by rank. A boundary never splits a run of ties, so bins
    // hold disjoint value ranges.
    out.binned = true;
    const size_t n = sorted.size();
    size_t start = 0;
    size_t run = 0;
    for (size_t b = 1; b <= bins && start < n; ++b) {
      size_t end = n;
      if (b < bins) {
        const size_t target = b * n / bins;
        while (run < runs.size() && runs[run].first < target) ++run;
        end = run < runs.size() ? runs[run].first : n;
        if (end <= start) continue;
      }
      const size_t median = start + (end - start - 1) / 2;
      add(sorted[median], sorted[start], sorted[end - 1], end - start);
      start = end;
    }
  }
  if (discrete && missing > 0) add(kMissing, kMissing, kMissing, missing);

  out.weights.reserve(out.counts.size());
  for (const size_t c : out.counts) {
    out.weights.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  return out;
}

JointValueSet ComputeJointValueSet(const Dataset& dataset,
                                   const ValueSet& first,
                                   const ValueSet& second) {
  JointValueSet out;
  out.first_feature = first.feature_index;
  out.second_feature = second.feature_index;
  if (first.feature_index == second.feature_index) {
    for (size_t i = 0; i < first.size(); ++i) {
      out.pairs.emplace_back(i, i);
      out.weights.push_back(first.weights[i]);
      out.counts.push_back(first.counts[i]);
    }
    return out;
  }
  const auto a = dataset.column(first.feature_index);
  const auto b = dataset.column(second.feature_index);
  std::map<std::pair<size_t, size_t>, size_t> counts;
  size_t total = 0;
  for (size_t r = 0; r < a.size(); ++r) {
    const auto ia = first.IndexOf(a[r]);
    const auto ib = second.IndexOf(b[r]);
    if (!ia || !ib) continue;
    ++counts[{*ia, *ib}];
    ++total;
  }
  for (const auto& [pair, count] : counts) {
    out.pairs.push_back(pair);
    out.counts.push_back(count);
    out.weights.push_back(static_cast<double>(count) /
                          static_cast<double>(total));
  }
  return out;
}

absl::StatusOr<JointValueSet> ComputeJointValueSet(const Dataset& dataset,
                                                   size_t j, size_t k,
                                                   int max_bins) {
  POVEX_ASSIGN_OR_RETURN(ValueSet first, ComputeValueSet(dataset, j, max_bins));
  if (j == k) return ComputeJointValueSet(dataset, first, first);
  POVEX_ASSIGN_OR_RETURN(ValueSet second, ComputeValueSet(dataset, k, max_bins));
  return ComputeJointValueSet(dataset, first, second);
}

}  // namespace povex::tabular
