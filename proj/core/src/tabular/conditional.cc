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

#include "povex/tabular/conditional.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "povex/status.h"

namespace povex::tabular {

std::optional<int> DriverPartition::BinOf(double value) const {
  if (IsMissing(value)) {
    if (missing_bin < 0) return std::nullopt;
    return missing_bin;
  }
  if (numeric) {
    return static_cast<int>(
        std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
  }
  const double code = value;
  if (code < 0 || code >= static_cast<double>(code_bins.size()) ||
      code != static_cast<double>(static_cast<size_t>(code))) {
    return std::nullopt;
  }
  const int bin = code_bins[static_cast<size_t>(code)];
  if (bin < 0) return std::nullopt;
  return bin;
}

size_t ConditionalityRule::num_subsets() const {
  size_t n = 1;
  for (const auto& d : drivers) n *= static_cast<size_t>(d.num_bins);
  return n;
}

std::optional<size_t> ConditionalityRule::SubsetOf(
    std::span<const double> values) const {
  size_t subset = 0;
  for (const auto& d : drivers) {
    const auto bin = d.BinOf(values[d.feature]);
    if (!bin) return std::nullopt;
    subset = subset * static_cast<size_t>(d.num_bins) +
             static_cast<size_t>(*bin);
  }
  return subset;
}

std::string ConditionalityRule::SubsetLabel(size_t subset) const {
  std::vector<std::string> parts(drivers.size());
  for (size_t i = drivers.size(); i-- > 0;) {
    const auto bins = static_cast<size_t>(drivers[i].num_bins);
    parts[i] = drivers[i].bin_labels[subset % bins];
    subset /= bins;
  }
  return absl::StrJoin(parts, " & ");
}

bool ConditionalityRule::HasDriver(size_t feature) const {
  return std::any_of(drivers.begin(), drivers.end(),
                     [&](const DriverPartition& d) { return d.feature == feature; });
}

namespace {

std::optional<size_t> IndexOfName(const std::vector<FeatureSchema>& features,
                                  const std::string& name) {
  for (size_t j = 0; j < features.size(); ++j) {
    if (features[j].name == name) return j;
  }
  return std::nullopt;
}

std::string FormatCut(double v) { return nlohmann::json(v).dump(); }

}  // namespace

absl::StatusOr<std::vector<ConditionalityRule>> ResolveRules(
    const std::vector<ConditionalitySpec>& specs,
    const std::vector<FeatureSchema>& features,
    const std::string& missing_sentinel) {
  std::vector<ConditionalityRule> rules;
  for (const auto& spec : specs) {
    ConditionalityRule rule;
    rule.name = spec.name;
    if (spec.drivers.empty()) {
      return MakeError(ErrorKind::kPartitionError,
                       absl::StrCat("rule `", spec.name, "` has no drivers"));
    }
    for (const auto& d : spec.drivers) {
      const auto index = IndexOfName(features, d.feature);
      if (!index) {
        return MakeError(ErrorKind::kPartitionError,
                         absl::StrCat("rule `", spec.name,
                                      "` names unknown driver `", d.feature,
                                      "`"));
      }
      const FeatureSchema& f = features[*index];
      DriverPartition part;
      part.feature = *index;
      part.numeric = !f.is_discrete();
      if (part.numeric) {
        part.cuts = d.cuts;
        part.num_bins = static_cast<int>(part.cuts.size()) + 2;
        for (size_t i = 0; i <= part.cuts.size(); ++i) {
          const std::string lo = i == 0 ? "-inf" : FormatCut(part.cuts[i - 1]);
          const std::string hi =
              i == part.cuts.size() ? "inf" : FormatCut(part.cuts[i]);
          part.bin_labels.push_back(absl::StrCat(f.name, " in [", lo, ",", hi,
                                                 ")"));
        }
        part.missing_bin = part.num_bins - 1;
        part.bin_labels.push_back(absl::StrCat(f.name, " missing"));
      } else if (d.groups.empty()) {
        const auto k = f.categories.size();
        part.code_bins.resize(k);
        for (size_t c = 0; c < k; ++c) {
          part.code_bins[c] = static_cast<int>(c);
          part.bin_labels.push_back(absl::StrCat(f.name, "=", f.categories[c]));
        }
        part.missing_bin = static_cast<int>(k);
        part.bin_labels.push_back(absl::StrCat(f.name, " missing"));
        part.num_bins = static_cast<int>(k) + 1;
      } else {
        part.code_bins.assign(f.categories.size(), -1);
        for (size_t g = 0; g < d.groups.size(); ++g) {
          for (const auto& label : d.groups[g]) {
            if (label == missing_sentinel) {
              if (part.missing_bin >= 0) {
                return MakeError(ErrorKind::kPartitionError,
                                 absl::StrCat("rule `", spec.name,
                                              "`: missing listed twice for `",
                                              f.name, "`"));
              }
              part.missing_bin = static_cast<int>(g);
              continue;
            }
            const auto it =
                std::find(f.categories.begin(), f.categories.end(), label);
            if (it == f.categories.end()) {
              return MakeError(ErrorKind::kPartitionError,
                               absl::StrCat("rule `", spec.name,
                                            "`: unknown label \"", label,
                                            "\" for `", f.name, "`"));
            }
            auto& bin = part.code_bins[it - f.categories.begin()];
            if (bin >= 0) {
              return MakeError(ErrorKind::kPartitionError,
                               absl::StrCat("rule `", spec.name, "`: label \"",
                                            label, "\" of `", f.name,
                                            "` is in two groups"));
            }
            bin = static_cast<int>(g);
          }
          part.bin_labels.push_back(absl::StrCat(
              f.name, " in {", absl::StrJoin(d.groups[g], ","), "}"));
        }
        part.num_bins = static_cast<int>(d.groups.size());
      }
      rule.drivers.push_back(std::move(part));
    }
    for (const auto& name : spec.dependents) {
      const auto index = IndexOfName(features, name);
      if (!index) {
        return MakeError(ErrorKind::kPartitionError,
                         absl::StrCat("rule `", spec.name,
                                      "` names unknown dependent `", name,
                                      "`"));
      }
      rule.dependents.push_back(*index);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<RuleViolation> CheckRules(
    const std::vector<ConditionalityRule>& rules,
    const std::vector<FeatureSchema>& features) {
  std::vector<RuleViolation> out;
  const size_t d = features.size();
  for (const auto& rule : rules) {
    std::set<size_t> drivers;
    for (const auto& p : rule.drivers) {
      if (p.feature >= d) {
        out.push_back({RuleViolation::Kind::kIndexOutOfRange, rule.name,
                       std::to_string(p.feature), "driver index out of range"});
        continue;
      }
      drivers.insert(p.feature);
    }
    for (const size_t dep : rule.dependents) {
      if (dep >= d) {
        out.push_back({RuleViolation::Kind::kIndexOutOfRange, rule.name,
                       std::to_string(dep), "dependent index out of range"});
        continue;
      }
      if (drivers.contains(dep)) {
        out.push_back({RuleViolation::Kind::kDisjointness, rule.name,
                       features[dep].name,
                       "feature is both a driver and a dependent"});
      }
    }
  }
  return out;
}

absl::Status ValidateRules(const std::vector<ConditionalityRule>& rules,
                           const std::vector<FeatureSchema>& features) {
  const auto violations = CheckRules(rules, features);
  if (violations.empty()) return absl::OkStatus();
  const auto& v = violations.front();
  return MakeError(ErrorKind::kPartitionError,
                   absl::StrCat("rule `", v.rule, "`, feature `", v.feature,
                                "`: ", v.detail));
}

RuleAnalysis AnalyzeRules(const std::vector<ConditionalityRule>& rules,
                          const Dataset& dataset) {
  RuleAnalysis analysis;
  analysis.violations = CheckRules(rules, dataset.features());
  if (!analysis.violations.empty()) return analysis;
  for (const auto& rule : rules) {
    // Totality: every observed driver value maps to a bin.
    for (const auto& p : rule.drivers) {
      std::map<std::string, size_t> unmapped;
      for (const double v : dataset.column(p.feature)) {
        if (!p.BinOf(v)) ++unmapped[dataset.feature(p.feature).Label(v)];
      }
      for (const auto& [label, rows] : unmapped) {
        analysis.violations.push_back(
            {RuleViolation::Kind::kTotality, rule.name,
             dataset.feature(p.feature).name,
             absl::StrCat("observed value \"", label,
                          "\" is not covered by the partition"),
             rows});
      }
    }
    std::vector<size_t> counts(rule.num_subsets(), 0);
    std::vector<double> row(dataset.num_features());
    for (size_t i = 0; i < dataset.num_rows(); ++i) {
      for (const auto& p : rule.drivers) row[p.feature] = dataset.value(i, p.feature);
      if (const auto s = rule.SubsetOf(row)) ++counts[*s];
    }
    for (size_t s = 0; s < counts.size(); ++s) {
      // Subsets whose only constraint is a missing numeric driver are
      // structural, never reported as empty.
      bool missing_bin = false;
      size_t rest = s;
      for (size_t i = rule.drivers.size(); i-- > 0;) {
        const auto& p = rule.drivers[i];
        const auto bins = static_cast<size_t>(p.num_bins);
        if (static_cast<int>(rest % bins) == p.missing_bin) missing_bin = true;
        rest /= bins;
      }
      SubsetCount entry{rule.name, rule.SubsetLabel(s), counts[s]};
      if (missing_bin && counts[s] == 0) continue;
      analysis.subsets.push_back(entry);
      if (counts[s] == 0) analysis.empty_subsets.push_back(entry);
    }
  }
  return analysis;
}

absl::string_view ResampleWarningName(ResampleWarning::Code code) {
  switch (code) {
    case ResampleWarning::Code::kEmptySubset:
      return "EMPTY_SUBSET";
    case ResampleWarning::Code::kUnmappedDriver:
      return "UNMAPPED_DRIVER";
  }
  return "EMPTY_SUBSET";
}

double ConditionalSampler::Distribution::Draw(double uniform) const {
  const double target = uniform * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const size_t i = std::min(static_cast<size_t>(it - cumulative.begin()),
                            values.size() - 1);
  return values[i];
}

size_t ConditionalSampler::Distribution::CountOf(double value) const {
  for (size_t i = 0; i < values.size(); ++i) {
    if (SameValue(values[i], value)) {
      const double prev = i == 0 ? 0.0 : cumulative[i - 1];
      return static_cast<size_t>(cumulative[i] - prev);
    }
  }
  return 0;
}

ConditionalSampler::Distribution ConditionalSampler::BuildDistribution(
    std::span<const double> column, const std::vector<size_t>& rows,
    bool include_missing) {
  std::map<double, size_t> counts;
  size_t missing = 0;
  for (const size_t r : rows) {
    const double v = column[r];
    if (IsMissing(v)) {
      ++missing;
    } else {
      ++counts[v];
    }
  }
  Distribution dist;
  double running = 0;
  for (const auto& [value, count] : counts) {
    running += static_cast<double>(count);
    dist.values.push_back(value);
    dist.cumulative.push_back(running);
  }
  if (include_missing && missing > 0) {
    running += static_cast<double>(missing);
    dist.values.push_back(kMissing);
    dist.cumulative.push_back(running);
  }
  return dist;
}

absl::StatusOr<ConditionalSampler> ConditionalSampler::Create(
    const Dataset& reference, std::vector<ConditionalityRule> rules) {
  POVEX_RETURN_IF_ERROR(ValidateRules(rules, reference.features()));
  ConditionalSampler sampler;
  const size_t n = reference.num_rows();
  std::vector<size_t> all_rows(n);
  for (size_t i = 0; i < n; ++i) all_rows[i] = i;
  sampler.unconditional_.resize(reference.num_features());
  std::set<size_t> dependents;
  for (const auto& rule : rules) {
    dependents.insert(rule.dependents.begin(), rule.dependents.end());
  }
  for (const size_t j : dependents) {
    sampler.unconditional_[j] = BuildDistribution(
        reference.column(j), all_rows, reference.feature(j).is_discrete());
  }
  std::vector<double> row(reference.num_features());
  for (const auto& rule : rules) {
    std::vector<std::vector<size_t>> members(rule.num_subsets());
    for (size_t i = 0; i < n; ++i) {
      for (const auto& p : rule.drivers) row[p.feature] = reference.value(i, p.feature);
      if (const auto s = rule.SubsetOf(row)) members[*s].push_back(i);
    }
    std::vector<std::vector<Distribution>> per_subset(members.size());
    std::vector<size_t> sizes(members.size());
    for (size_t s = 0; s < members.size(); ++s) {
      sizes[s] = members[s].size();
      for (const size_t dep : rule.dependents) {
        per_subset[s].push_back(BuildDistribution(
            reference.column(dep), members[s],
            reference.feature(dep).is_discrete()));
      }
    }
    sampler.conditional_.push_back(std::move(per_subset));
    sampler.subset_rows_.push_back(std::move(sizes));
  }
  sampler.rules_ = std::move(rules);
  return sampler;
}

bool ConditionalSampler::Triggers(std::span<const size_t> perturbed) const {
  for (const auto& rule : rules_) {
    for (const size_t j : perturbed) {
      if (rule.HasDriver(j)) return true;
    }
  }
  return false;
}

void ConditionalSampler::Resample(std::span<double> values,
                                  std::span<const size_t> perturbed,
                                  uint64_t seed, ResampleTrace* trace) const {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (size_t r = 0; r < rules_.size(); ++r) {
    const auto& rule = rules_[r];
    const bool triggered =
        std::any_of(perturbed.begin(), perturbed.end(),
                    [&](size_t j) { return rule.HasDriver(j); });
    if (!triggered) continue;
    if (trace) trace->triggered_rules.push_back(r);
    const auto subset = rule.SubsetOf(values);
    for (size_t k = 0; k < rule.dependents.size(); ++k) {
      const size_t dep = rule.dependents[k];
      const Distribution* dist = nullptr;
      if (subset && conditional_[r][*subset][k].total() > 0) {
        dist = &conditional_[r][*subset][k];
      } else {
        if (trace) {
          trace->warnings.push_back(
              {subset ? ResampleWarning::Code::kEmptySubset
                      : ResampleWarning::Code::kUnmappedDriver,
               r, dep});
        }
        if (unconditional_[dep].total() > 0) dist = &unconditional_[dep];
      }
      // Draw even without a distribution so the stream stays aligned.
      const double u = uniform();
      if (dist) values[dep] = dist->Draw(u);
    }
  }
}

size_t ConditionalSampler::MassInSubset(size_t rule, size_t subset,
                                        size_t feature, double value) const {
  const auto& deps = rules_[rule].dependents;
  for (size_t k = 0; k < deps.size(); ++k) {
    if (deps[k] == feature) return conditional_[rule][subset][k].CountOf(value);
  }
  return 0;
}

absl::StatusOr<Household> ConditionalResample(
    const Dataset& dataset, const std::vector<ConditionalityRule>& rules,
    const Household& instance, std::span<const size_t> perturbed,
    uint64_t seed, ResampleTrace* trace) {
  if (instance.values.size() != dataset.num_features()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "instance width differs from the schema");
  }
  POVEX_ASSIGN_OR_RETURN(ConditionalSampler sampler,
                         ConditionalSampler::Create(dataset, rules));
  Household out = instance;
  sampler.Resample(out.values, perturbed, seed, trace);
  return out;
}

}  // namespace povex::tabular
