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

#ifndef POVEX_TABULAR_CONDITIONAL_H_
#define POVEX_TABULAR_CONDITIONAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"

namespace povex::tabular {

// Maps one driver's value to a bin of its partition.
struct DriverPartition {
  size_t feature = 0;
  bool numeric = true;
  std::vector<double> cuts;
  // Discrete drivers: bin of each category code, -1 when unmapped.
  std::vector<int> code_bins;
  int missing_bin = -1;
  int num_bins = 0;
  std::vector<std::string> bin_labels;

  std::optional<int> BinOf(double value) const;
};

// Driver -> dependents rule. The joint bin of all drivers (mixed radix, first
// driver most significant) is the subset label.
struct ConditionalityRule {
  std::string name;
  std::vector<DriverPartition> drivers;
  std::vector<size_t> dependents;

  size_t num_subsets() const;
  std::optional<size_t> SubsetOf(std::span<const double> values) const;
  std::string SubsetLabel(size_t subset) const;
  bool HasDriver(size_t feature) const;
};

// Turns declared specs into index-based rules. Fails on unknown feature names
// or labels and on a label listed in two groups. Disjointness and totality
// are data checks reported by CheckRules / AnalyzeRules.
absl::StatusOr<std::vector<ConditionalityRule>> ResolveRules(
    const std::vector<ConditionalitySpec>& specs,
    const std::vector<FeatureSchema>& features,
    const std::string& missing_sentinel);

struct RuleViolation {
  enum class Kind { kDisjointness, kTotality, kIndexOutOfRange };
  Kind kind;
  std::string rule;
  std::string feature;
  std::string detail;
  size_t rows = 0;
};

// Structural checks against a feature count (driver/dependent overlap).
std::vector<RuleViolation> CheckRules(
    const std::vector<ConditionalityRule>& rules,
    const std::vector<FeatureSchema>& features);

// CheckRules as a status: the first violation as InvalidArgument.
absl::Status ValidateRules(const std::vector<ConditionalityRule>& rules,
                           const std::vector<FeatureSchema>& features);

struct SubsetCount {
  std::string rule;
  std::string subset;
  size_t rows = 0;
};

struct RuleAnalysis {
  std::vector<RuleViolation> violations;  // structural + totality
  std::vector<SubsetCount> subsets;       // every subset with its row count
  std::vector<SubsetCount> empty_subsets;
};

RuleAnalysis AnalyzeRules(const std::vector<ConditionalityRule>& rules,
                          const Dataset& dataset);

struct ResampleWarning {
  enum class Code { kEmptySubset, kUnmappedDriver };
  Code code;
  size_t rule = 0;
  size_t feature = 0;
};

absl::string_view ResampleWarningName(ResampleWarning::Code code);

// Trace of one resampling call, for warnings and feasibility audits.
struct ResampleTrace {
  std::vector<size_t> triggered_rules;
  std::vector<ResampleWarning> warnings;
  void Clear() {
    triggered_rules.clear();
    warnings.clear();
  }
};

// Precomputed per-subset empirical distributions of every dependent feature
// over a reference dataset. Immutable; safe for concurrent use.
class ConditionalSampler {
 public:
  static absl::StatusOr<ConditionalSampler> Create(
      const Dataset& reference, std::vector<ConditionalityRule> rules);

  const std::vector<ConditionalityRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  bool Triggers(std::span<const size_t> perturbed) const;

  // For every rule with a driver in `perturbed` (in declaration order), finds
  // the subset of the current values and redraws each dependent from the
  // subset's empirical distribution. One uniform draw per dependent, all from
  // a generator seeded with `seed`.
  void Resample(std::span<double> values, std::span<const size_t> perturbed,
                uint64_t seed, ResampleTrace* trace = nullptr) const;

  // Observed count of `value` for dependent `feature` within `subset` of rule
  // `rule` in the reference data; 0 for unobserved combinations.
  size_t MassInSubset(size_t rule, size_t subset, size_t feature,
                      double value) const;
  size_t SubsetRows(size_t rule, size_t subset) const {
    return subset_rows_[rule][subset];
  }

 private:
  struct Distribution {
    std::vector<double> values;
    std::vector<double> cumulative;  // running counts, exact in double
    size_t total() const {
      return cumulative.empty() ? 0 : static_cast<size_t>(cumulative.back());
    }
    double Draw(double uniform) const;
    size_t CountOf(double value) const;
  };

  static Distribution BuildDistribution(std::span<const double> column,
                                        const std::vector<size_t>& rows,
                                        bool include_missing);

  std::vector<ConditionalityRule> rules_;
  // [rule][subset][dependent position]
  std::vector<std::vector<std::vector<Distribution>>> conditional_;
  std::vector<std::vector<size_t>> subset_rows_;
  std::vector<Distribution> unconditional_;  // per feature
};

// One-shot form: builds a sampler over `dataset` and resamples `instance`.
absl::StatusOr<Household> ConditionalResample(
    const Dataset& dataset, const std::vector<ConditionalityRule>& rules,
    const Household& instance, std::span<const size_t> perturbed,
    uint64_t seed, ResampleTrace* trace = nullptr);

}  // namespace povex::tabular

#endif  // POVEX_TABULAR_CONDITIONAL_H_
