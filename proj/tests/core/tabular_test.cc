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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "povex/hash.h"
#include "povex/status.h"
#include "povex/tabular/conditional.h"
#include "povex/tabular/contrastive.h"
#include "povex/tabular/dataset.h"
#include "povex/tabular/schema.h"
#include "povex/tabular/value_set.h"

namespace povex::tabular {
namespace {

using nlohmann::json;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

json SmallSchemaJson() {
  return json::parse(R"({
    "schema_version": 1,
    "missing_sentinel": "NA",
    "poverty_line": 100,
    "min_contrastive_rows": 2,
    "columns": {"income": "y", "id": "hid", "formal_income": "fy"},
    "groups": [{"id": "g1", "label": "first"}, {"id": "g2", "label": "second"}],
    "features": [
      {"name": "age", "kind": "numeric", "group": "g1", "unit": "years"},
      {"name": "formal", "kind": "boolean", "group": "g1"},
      {"name": "sector", "kind": "categorical", "group": "g2",
       "categories": ["none", "private", "public"]}
    ],
    "conditionalities": [
      {"name": "r", "drivers": ["age", "formal"],
       "partition": {"age": {"cuts": [30]}},
       "dependents": ["sector"]}
    ]
  })");
}

Schema SmallSchema() { return ParseSchema(SmallSchemaJson()).value(); }

constexpr const char* kSmallCsv =
    "hid,age,formal,sector,y,fy\n"
    "a,25,1,private,50,40\n"
    "b,40,0,none,80,\n"
    "c,35,1,public,150,90\n"
    "d,NA,0,NA,120,\n"
    "e,28,0,none,60,\n";

TEST(SchemaTest, ParsesFeaturesGroupsAndRules) {
  const Schema schema = SmallSchema();
  ASSERT_EQ(schema.features.size(), 3u);
  EXPECT_EQ(schema.features[1].categories, (std::vector<std::string>{"0", "1"}));
  EXPECT_EQ(schema.features[0].unit, "years");
  EXPECT_EQ(schema.groups[1].label, "second");
  EXPECT_EQ(schema.poverty.poverty_line, 100);
  EXPECT_EQ(schema.poverty.min_contrastive_rows, 2);
  EXPECT_EQ(schema.columns.income, "y");
  ASSERT_EQ(schema.conditionalities.size(), 1u);
  EXPECT_EQ(schema.conditionalities[0].drivers[0].cuts, std::vector<double>{30});
  EXPECT_EQ(schema.FeatureIndex("sector"), 2);
  EXPECT_FALSE(schema.FeatureIndex("nope").has_value());
}

TEST(SchemaTest, RoundTripsThroughJson) {
  const Schema schema = SmallSchema();
  const Schema again = ParseSchema(SchemaToJson(schema)).value();
  EXPECT_EQ(SchemaToJson(again), SchemaToJson(schema));
}

TEST(SchemaTest, RejectsBadDocuments) {
  json j = SmallSchemaJson();
  j["schema_version"] = 2;
  EXPECT_FALSE(ParseSchema(j).ok());
  j = SmallSchemaJson();
  j["features"][0]["kind"] = "ordinal";
  EXPECT_FALSE(ParseSchema(j).ok());
  j = SmallSchemaJson();
  j.erase("features");
  EXPECT_FALSE(ParseSchema(j).ok());
  j = SmallSchemaJson();
  j["min_contrastive_rows"] = 0;
  EXPECT_FALSE(ParseSchema(j).ok());
}

TEST(CsvTest, SplitsQuotedRecords) {
  const auto records =
      ParseCsvRecords("a,\"b,c\",\"d\"\"e\"\r\n1,,3\n").value();
  ASSERT_EQ(records.size(), 2u);
  EXPECT_THAT(records[0], ElementsAre("a", "b,c", "d\"e"));
  EXPECT_THAT(records[1], ElementsAre("1", "", "3"));
}

TEST(DatasetTest, LoadsColumnsRolesAndMissing) {
  const Schema schema = SmallSchema();
  const Dataset ds = ParseDatasetCsv(kSmallCsv, schema, "mem").value();
  EXPECT_EQ(ds.num_rows(), 5u);
  EXPECT_EQ(ds.num_features(), 3u);
  EXPECT_EQ(ds.value(0, 0), 25);
  EXPECT_EQ(ds.value(2, 2), 2);  // "public"
  EXPECT_TRUE(IsMissing(ds.value(3, 0)));
  EXPECT_TRUE(IsMissing(ds.value(3, 2)));
  EXPECT_THAT(std::vector<double>(ds.income().begin(), ds.income().end()),
              ElementsAre(50, 80, 150, 120, 60));
  const Household h = ds.Row(3);
  EXPECT_EQ(h.id, "d");
  EXPECT_THAT(h.MissingIndices(), ElementsAre(0, 2));
  EXPECT_EQ(ds.Row(0).observed_formal_income, 40);
  EXPECT_FALSE(ds.Row(1).observed_formal_income.has_value());
  EXPECT_EQ(ds.RowIndexById("c"), 2u);
  EXPECT_FALSE(ds.RowIndexById("zz").has_value());
}

TEST(DatasetTest, ReportsSchemaMismatchParseErrorsAndEmptyData) {
  const Schema schema = SmallSchema();
  auto missing_col = ParseDatasetCsv("hid,age,formal,y,fy\na,1,0,3,\n", schema, "m");
  EXPECT_TRUE(IsErrorKind(missing_col.status(), ErrorKind::kSchemaMismatch));
  auto extra_col =
      ParseDatasetCsv("hid,age,formal,sector,y,fy,zz\na,1,0,none,3,,1\n", schema, "m");
  EXPECT_TRUE(IsErrorKind(extra_col.status(), ErrorKind::kSchemaMismatch));
  auto bad_number =
      ParseDatasetCsv("hid,age,formal,sector,y,fy\na,1,0,none,3,\nb,x,0,none,3,\n",
                      schema, "m");
  EXPECT_TRUE(IsErrorKind(bad_number.status(), ErrorKind::kParseError));
  EXPECT_THAT(std::string(bad_number.status().message()), HasSubstr("3"));
  auto bad_category =
      ParseDatasetCsv("hid,age,formal,sector,y,fy\na,1,0,army,3,\n", schema, "m");
  EXPECT_TRUE(IsErrorKind(bad_category.status(), ErrorKind::kParseError));
  auto empty = ParseDatasetCsv("hid,age,formal,sector,y,fy\n", schema, "m");
  EXPECT_TRUE(IsErrorKind(empty.status(), ErrorKind::kEmptyDataset));
}

TEST(DatasetTest, CsvRoundTripPreservesCells) {
  const Schema schema = SmallSchema();
  const Dataset ds = ParseDatasetCsv(kSmallCsv, schema, "mem").value();
  const Dataset again = ParseDatasetCsv(DatasetToCsv(ds, schema), schema, "mem").value();
  EXPECT_EQ(again.ContentHash(), ds.ContentHash());
  EXPECT_EQ(again.metadata().ids, ds.metadata().ids);
  EXPECT_EQ(again.metadata().formal_income, ds.metadata().formal_income);
}

TEST(DatasetTest, SubsetFollowsRowsAndHashIsContentBased) {
  const Schema schema = SmallSchema();
  const Dataset ds = ParseDatasetCsv(kSmallCsv, schema, "mem").value();
  const std::vector<size_t> rows = {4, 0};
  const Dataset sub = ds.Subset(rows, "sub");
  EXPECT_EQ(sub.num_rows(), 2u);
  EXPECT_EQ(sub.Row(0).id, "e");
  EXPECT_EQ(sub.income()[1], 50);
  EXPECT_NE(sub.ContentHash(), ds.ContentHash());
  const Dataset same = ParseDatasetCsv(kSmallCsv, schema, "other-tag").value();
  EXPECT_EQ(same.ContentHash(), ds.ContentHash());
}

// Independent quantile binning: sort, then cut every n/bins ranks, moving
// each cut forward to the next change of value.
std::vector<std::pair<double, double>> SliceOracle(std::vector<double> xs,
                                                   size_t bins) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  std::vector<size_t> cuts;
  for (size_t b = 1; b < bins; ++b) {
    size_t c = b * n / bins;
    while (c > 0 && c < n && xs[c] == xs[c - 1]) ++c;
    if (c > 0 && c < n && (cuts.empty() || c > cuts.back())) cuts.push_back(c);
  }
  std::vector<std::pair<double, double>> out;  // (value, weight)
  size_t start = 0;
  cuts.push_back(n);
  for (const size_t end : cuts) {
    if (end <= start) continue;
    out.emplace_back(xs[start + (end - start - 1) / 2],
                     static_cast<double>(end - start) / static_cast<double>(n));
    start = end;
  }
  return out;
}

Dataset OneColumn(std::vector<double> xs, FeatureKind kind = FeatureKind::kNumeric,
                  std::vector<std::string> categories = {}) {
  FeatureSchema f;
  f.name = "x";
  f.kind = kind;
  f.categories = std::move(categories);
  if (kind == FeatureKind::kBoolean) f.categories = {"0", "1"};
  std::vector<double> y(xs.size(), 1.0);
  return Dataset::Create({f}, {std::move(xs)}, std::move(y)).value();
}

TEST(ValueSetTest, QuantileBinsMatchSortAndSlice) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 1 + rng() % 300;
    const int levels = 1 + static_cast<int>(rng() % 60);
    std::vector<double> xs(n);
    for (auto& x : xs) x = static_cast<double>(rng() % levels) * 1.5;
    const int bins = 2 + static_cast<int>(rng() % 20);
    const ValueSet vs = ComputeValueSet(OneColumn(xs), 0, bins).value();
    std::set<double> distinct(xs.begin(), xs.end());
    if (distinct.size() <= static_cast<size_t>(bins)) {
      ASSERT_FALSE(vs.binned);
      ASSERT_EQ(vs.size(), distinct.size());
      continue;
    }
    const auto expected = SliceOracle(xs, static_cast<size_t>(bins));
    ASSERT_TRUE(vs.binned);
    ASSERT_EQ(vs.size(), expected.size()) << "trial " << trial;
    ASSERT_LE(vs.size(), static_cast<size_t>(bins));
    for (size_t i = 0; i < vs.size(); ++i) {
      EXPECT_EQ(vs.values[i], expected[i].first);
      EXPECT_DOUBLE_EQ(vs.weights[i], expected[i].second);
    }
  }
}

TEST(ValueSetTest, WeightsSumToOneAndIndexOfFindsEveryObservation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 1 + rng() % 200;
    std::vector<double> xs(n);
    for (auto& x : xs) {
      x = (rng() % 10 == 0) ? kMissing : std::ldexp(static_cast<double>(rng() % 1000), -3);
    }
    xs[0] = 1.0;
    const ValueSet vs = ComputeValueSet(OneColumn(xs), 0, 8).value();
    double total = 0;
    for (const double w : vs.weights) total += w;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(vs.values.begin(), vs.values.end()));
    for (const double x : xs) {
      if (IsMissing(x)) {
        EXPECT_FALSE(vs.IndexOf(x).has_value());
        continue;
      }
      const auto i = vs.IndexOf(x);
      ASSERT_TRUE(i.has_value());
      EXPECT_LE(vs.lower[*i], x);
      EXPECT_GE(vs.upper[*i], x);
    }
  }
}

TEST(ValueSetTest, DiscreteMissingIsItsOwnCategoryLast) {
  const ValueSet vs =
      ComputeValueSet(OneColumn({1, 0, kMissing, 1}, FeatureKind::kBoolean), 0)
          .value();
  ASSERT_EQ(vs.size(), 3u);
  EXPECT_EQ(vs.values[0], 0);
  EXPECT_EQ(vs.values[1], 1);
  EXPECT_TRUE(IsMissing(vs.values[2]));
  EXPECT_THAT(vs.weights, ElementsAre(0.25, 0.5, 0.25));
  EXPECT_EQ(vs.IndexOf(kMissing), 2u);
}

TEST(ValueSetTest, AllMissingColumnFails) {
  const auto vs = ComputeValueSet(OneColumn({kMissing, kMissing}), 0);
  EXPECT_TRUE(IsErrorKind(vs.status(), ErrorKind::kAllMissingColumn));
}

TEST(ValueSetTest, JointWeightsAreBruteForceCounts) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 5 + rng() % 80;
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng() % 4);
      b[i] = rng() % 7 == 0 ? kMissing : static_cast<double>(rng() % 3);
    }
    a[0] = 0;
    b[0] = 0;
    FeatureSchema fa{"a", FeatureKind::kNumeric};
    FeatureSchema fb{"b", FeatureKind::kNumeric};
    const Dataset ds =
        Dataset::Create({fa, fb}, {a, b}, std::vector<double>(n, 1.0)).value();
    const auto joint = ComputeJointValueSet(ds, 0, 1).value();
    std::map<std::pair<double, double>, size_t> counts;
    size_t total = 0;
    for (size_t i = 0; i < n; ++i) {
      if (IsMissing(b[i])) continue;
      ++counts[{a[i], b[i]}];
      ++total;
    }
    const auto va = ComputeValueSet(ds, 0).value();
    const auto vb = ComputeValueSet(ds, 1).value();
    ASSERT_EQ(joint.size(), counts.size());
    size_t p = 0;
    double sum = 0;
    for (const auto& [key, count] : counts) {
      EXPECT_EQ(va.values[joint.pairs[p].first], key.first);
      EXPECT_EQ(vb.values[joint.pairs[p].second], key.second);
      EXPECT_EQ(joint.weights[p], static_cast<double>(count) / total);
      sum += joint.weights[p];
      ++p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

// Rows: (age, formal, sector) laid out so that every subset of the rule has
// a known composition.
Dataset RuleData() {
  const Schema schema = SmallSchema();
  std::string csv = "hid,age,formal,sector,y,fy\n";
  int id = 0;
  auto add = [&](int age, int formal, const char* sector, int y) {
    csv += "h" + std::to_string(id++) + "," + std::to_string(age) + "," +
           std::to_string(formal) + "," + sector + "," + std::to_string(y) + ",\n";
  };
  for (int i = 0; i < 6; ++i) add(20 + i, 0, "none", 40);
  for (int i = 0; i < 4; ++i) add(20 + i, 1, i % 2 ? "private" : "public", 70);
  for (int i = 0; i < 5; ++i) add(40 + i, 0, i == 0 ? "private" : "none", 120);
  for (int i = 0; i < 5; ++i) add(40 + i, 1, "public", 200);
  return ParseDatasetCsv(csv, schema, "rules").value();
}

std::vector<ConditionalityRule> SmallRules() {
  const Schema schema = SmallSchema();
  return ResolveRules(schema.conditionalities, schema.features,
                      schema.missing_sentinel)
      .value();
}

TEST(RuleTest, ResolvesPartitionsAndSubsets) {
  const auto rules = SmallRules();
  ASSERT_EQ(rules.size(), 1u);
  const auto& rule = rules[0];
  // age: [-inf,30), [30,inf), missing; formal: 0, 1, missing.
  EXPECT_EQ(rule.num_subsets(), 9u);
  const std::vector<double> young_formal = {25, 1, 0};
  EXPECT_EQ(rule.SubsetOf(young_formal), 1u);
  const std::vector<double> old_informal = {30, 0, 0};
  EXPECT_EQ(rule.SubsetOf(old_informal), 3u);
  EXPECT_THAT(rule.SubsetLabel(1), HasSubstr("formal=1"));
  EXPECT_TRUE(rule.HasDriver(0));
  EXPECT_FALSE(rule.HasDriver(2));
}

TEST(RuleTest, ResolveRejectsUnknownNamesAndDuplicateLabels) {
  const Schema schema = SmallSchema();
  ConditionalitySpec spec;
  spec.name = "bad";
  spec.drivers.push_back({"nope", {}, {}});
  spec.dependents = {"sector"};
  EXPECT_FALSE(ResolveRules({spec}, schema.features, "NA").ok());
  spec.drivers = {{"sector", {}, {{"none", "private"}, {"private"}}}};
  spec.dependents = {"age"};
  EXPECT_TRUE(IsErrorKind(ResolveRules({spec}, schema.features, "NA").status(),
                          ErrorKind::kPartitionError));
  spec.drivers = {{"sector", {}, {{"none"}, {"private", "public"}}}};
  spec.dependents = {"nope"};
  EXPECT_FALSE(ResolveRules({spec}, schema.features, "NA").ok());
}

TEST(RuleTest, OverlapOfDriversAndDependentsIsAViolation) {
  const Schema schema = SmallSchema();
  ConditionalitySpec spec;
  spec.name = "loop";
  spec.drivers.push_back({"formal", {}, {}});
  spec.dependents = {"formal"};
  const auto rules = ResolveRules({spec}, schema.features, "NA");
  if (!rules.ok()) return;  // rejected at resolution is also acceptable
  EXPECT_FALSE(CheckRules(*rules, schema.features).empty());
  EXPECT_FALSE(ValidateRules(*rules, schema.features).ok());
}

TEST(RuleTest, AnalyzeCountsSubsetsAndTotality) {
  const Dataset ds = RuleData();
  const Schema schema = SmallSchema();
  ConditionalitySpec spec;
  spec.name = "partial";
  spec.drivers.push_back({"sector", {}, {{"none"}, {"private"}}});
  spec.dependents = {"age"};
  const auto rules = ResolveRules({spec}, schema.features, "NA").value();
  const RuleAnalysis analysis = AnalyzeRules(rules, ds);
  ASSERT_FALSE(analysis.violations.empty());
  EXPECT_EQ(analysis.violations[0].kind, RuleViolation::Kind::kTotality);
  EXPECT_THAT(analysis.violations[0].detail, HasSubstr("public"));

  const RuleAnalysis clean = AnalyzeRules(SmallRules(), ds);
  EXPECT_TRUE(clean.violations.empty());
  size_t total = 0;
  for (const auto& s : clean.subsets) total += s.rows;
  EXPECT_EQ(total, ds.num_rows());
}

TEST(ConditionalTest, ResampledDependentsComeFromTheirSubset) {
  const Dataset ds = RuleData();
  const auto rules = SmallRules();
  const auto sampler = ConditionalSampler::Create(ds, rules).value();
  std::mt19937_64 rng(9);
  const std::vector<size_t> perturbed = {0};
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> values = {static_cast<double>(18 + rng() % 40),
                                  static_cast<double>(rng() % 2),
                                  static_cast<double>(rng() % 3)};
    ResampleTrace trace;
    sampler.Resample(values, perturbed, rng(), &trace);
    ASSERT_EQ(trace.triggered_rules.size(), 1u);
    ASSERT_TRUE(trace.warnings.empty());
    const size_t subset = *rules[0].SubsetOf(values);
    EXPECT_GT(sampler.MassInSubset(0, subset, 2, values[2]), 0u);
    // Young informal households only ever have sector "none".
    if (values[0] < 30 && values[1] == 0) EXPECT_EQ(values[2], 0);
    if (values[0] >= 30 && values[1] == 1) EXPECT_EQ(values[2], 2);
  }
}

TEST(ConditionalTest, DrawFrequenciesFollowSubsetProportions) {
  const Dataset ds = RuleData();
  const auto sampler = ConditionalSampler::Create(ds, SmallRules()).value();
  const std::vector<size_t> perturbed = {1};
  std::map<double, int> seen;
  const int draws = 20000;
  for (int s = 0; s < draws; ++s) {
    std::vector<double> values = {40, 0, 0};
    sampler.Resample(values, perturbed, DeriveSeed(1, {static_cast<uint64_t>(s)}));
    ++seen[values[2]];
  }
  // Subset (age >= 30, informal): 4 none, 1 private.
  EXPECT_NEAR(seen[0] / static_cast<double>(draws), 0.8, 0.02);
  EXPECT_NEAR(seen[1] / static_cast<double>(draws), 0.2, 0.02);
  EXPECT_EQ(seen.count(2), 0u);
}

TEST(ConditionalTest, UntriggeredRulesLeaveValuesAlone) {
  const Dataset ds = RuleData();
  const auto sampler = ConditionalSampler::Create(ds, SmallRules()).value();
  std::vector<double> values = {40, 0, 2};
  const std::vector<size_t> perturbed = {2};
  EXPECT_FALSE(sampler.Triggers(perturbed));
  ResampleTrace trace;
  sampler.Resample(values, perturbed, 1, &trace);
  EXPECT_THAT(values, ElementsAre(40, 0, 2));
  EXPECT_TRUE(trace.triggered_rules.empty());
}

TEST(ConditionalTest, SameSeedSameDraws) {
  const Dataset ds = RuleData();
  const auto sampler = ConditionalSampler::Create(ds, SmallRules()).value();
  const std::vector<size_t> perturbed = {0, 1};
  for (uint64_t seed = 0; seed < 50; ++seed) {
    std::vector<double> a = {22, 1, 0};
    std::vector<double> b = a;
    sampler.Resample(a, perturbed, seed);
    sampler.Resample(b, perturbed, seed);
    EXPECT_EQ(a, b);
  }
}

TEST(ConditionalTest, EmptySubsetFallsBackWithWarning) {
  const Dataset ds = RuleData();
  const auto sampler = ConditionalSampler::Create(ds, SmallRules()).value();
  // Missing age with formal=1 never occurs in the reference rows.
  std::vector<double> values = {kMissing, 1, 0};
  const std::vector<size_t> perturbed = {0};
  ResampleTrace trace;
  sampler.Resample(values, perturbed, 4, &trace);
  ASSERT_EQ(trace.warnings.size(), 1u);
  EXPECT_EQ(trace.warnings[0].code, ResampleWarning::Code::kEmptySubset);
  EXPECT_EQ(trace.warnings[0].feature, 2u);
  EXPECT_FALSE(IsMissing(values[2]));
}

TEST(ConditionalTest, OneShotFormMatchesSampler) {
  const Dataset ds = RuleData();
  const auto rules = SmallRules();
  const auto sampler = ConditionalSampler::Create(ds, rules).value();
  Household h;
  h.values = {41, 1, 0};
  const std::vector<size_t> perturbed = {1};
  const Household out = ConditionalResample(ds, rules, h, perturbed, 77).value();
  std::vector<double> values = h.values;
  sampler.Resample(values, perturbed, 77);
  EXPECT_EQ(out.values, values);
  h.values.pop_back();
  EXPECT_TRUE(IsErrorKind(ConditionalResample(ds, rules, h, perturbed, 1).status(),
                          ErrorKind::kLengthMismatch));
}

TEST(ContrastiveTest, KeepsRowsStrictlyBelowTheLine) {
  const Dataset ds = RuleData();
  PovertyConfig config{70, 2};
  const ContrastiveSet set = FilterContrastive(ds, config).value();
  EXPECT_EQ(set.cardinality(), 6u);
  for (size_t i = 0; i < set.cardinality(); ++i) {
    EXPECT_LT(set.rows.income()[i], 70);
    EXPECT_EQ(set.rows.Row(i).id, ds.Row(set.source_rows[i]).id);
  }
  EXPECT_TRUE(std::is_sorted(set.source_rows.begin(), set.source_rows.end()));
}

TEST(ContrastiveTest, TooFewRowsFails) {
  const Dataset ds = RuleData();
  const auto set = FilterContrastive(ds, PovertyConfig{40, 1});
  EXPECT_TRUE(IsErrorKind(set.status(), ErrorKind::kContrastiveSetTooSmall));
  const auto small = FilterContrastive(ds, PovertyConfig{70, 7});
  EXPECT_TRUE(IsErrorKind(small.status(), ErrorKind::kContrastiveSetTooSmall));
}

}  // namespace
}  // namespace povex::tabular
