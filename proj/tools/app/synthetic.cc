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

#include "tools/app/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "absl/strings/str_cat.h"
#include "povex/status.h"

namespace povex::app {
namespace {

using tabular::FeatureKind;
using tabular::FeatureSchema;
using tabular::kMissing;

// Platform-stable draws: the standard distributions are not specified
// bit-for-bit, the engine is.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool Bernoulli(double p) { return Uniform() < p; }
  int Between(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(Uniform() * (hi - lo + 1));
  }
  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0;
    while (u <= 0) u = Uniform();
    const double v = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }
  int Choice(std::initializer_list<double> probabilities) {
    double u = Uniform();
    int i = 0;
    for (const double p : probabilities) {
      if (u < p) return i;
      u -= p;
      ++i;
    }
    return i - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

FeatureSchema Numeric(std::string name, std::string group, std::string unit) {
  FeatureSchema f;
  f.name = std::move(name);
  f.kind = FeatureKind::kNumeric;
  f.group_id = std::move(group);
  f.unit = std::move(unit);
  return f;
}

FeatureSchema Boolean(std::string name, std::string group) {
  FeatureSchema f;
  f.name = std::move(name);
  f.kind = FeatureKind::kBoolean;
  f.group_id = std::move(group);
  f.categories = {"0", "1"};
  return f;
}

FeatureSchema Categorical(std::string name, std::string group,
                          std::vector<std::string> categories) {
  FeatureSchema f;
  f.name = std::move(name);
  f.kind = FeatureKind::kCategorical;
  f.group_id = std::move(group);
  f.categories = std::move(categories);
  return f;
}

enum Column {
  kAge,
  kHouseholdSize,
  kHeadFemale,
  kRegion,
  kSchooling,
  kEducation,
  kFormal,
  kLabor,
  kSector,
  kPension,
  kEarners,
  kHours,
  kRooms,
  kFloor,
  kWater,
  kSewage,
  kElectricity,
  kInternet,
  kCar,
  kFridge,
  kTv,
  kComputer,
  kPhones,
  kWasher,
  kNumColumns
};

}  // namespace

tabular::Schema SyntheticSchema() {
  tabular::Schema schema;
  schema.groups = {{"sociodemographic", "sociodemographic characteristics"},
                   {"occupation", "occupation"},
                   {"housing_services", "housing and services"},
                   {"assets", "assets"}};
  auto& f = schema.features;
  f.push_back(Numeric("head_age", "sociodemographic", "years"));
  f.push_back(Numeric("household_size", "sociodemographic", "persons"));
  f.push_back(Boolean("head_female", "sociodemographic"));
  f.push_back(Categorical("region", "sociodemographic",
                          {"urban_central", "urban_other", "rural_north",
                           "rural_south"}));
  f.push_back(Numeric("schooling_years", "sociodemographic", "years"));
  f.push_back(Categorical("education_level", "sociodemographic",
                          {"none", "primary", "secondary", "tertiary"}));
  f.push_back(Boolean("formal_activity", "occupation"));
  f.push_back(Categorical("labor_status", "occupation",
                          {"employed", "unemployed", "inactive", "retired"}));
  f.push_back(Categorical("occupation_sector", "occupation",
                          {"agriculture", "industry", "services", "public",
                           "none"}));
  f.push_back(Boolean("has_pension", "occupation"));
  f.push_back(Numeric("earners", "occupation", "persons"));
  f.push_back(Numeric("weekly_hours", "occupation", "hours"));
  f.push_back(Numeric("rooms", "housing_services", "count"));
  f.push_back(Categorical("floor_material", "housing_services",
                          {"dirt", "wood", "cement", "tile"}));
  f.push_back(Boolean("has_water", "housing_services"));
  f.push_back(Boolean("has_sewage", "housing_services"));
  f.push_back(Boolean("has_electricity", "housing_services"));
  f.push_back(Boolean("has_internet", "housing_services"));
  f.push_back(Boolean("has_car", "assets"));
  f.push_back(Boolean("has_fridge", "assets"));
  f.push_back(Boolean("has_tv", "assets"));
  f.push_back(Boolean("has_computer", "assets"));
  f.push_back(Numeric("phones", "assets", "count"));
  f.push_back(Boolean("has_washing_machine", "assets"));

  tabular::ConditionalitySpec rule;
  rule.name = "age_formal";
  rule.drivers = {{"head_age", {25, 45, 65}, {}}, {"formal_activity", {}, {}}};
  rule.dependents = {"schooling_years", "education_level", "labor_status",
                     "occupation_sector", "has_pension"};
  schema.conditionalities.push_back(rule);

  schema.poverty.poverty_line = kSyntheticPovertyLine;
  schema.poverty.min_contrastive_rows = 30;
  schema.missing_sentinel = "";
  schema.columns.id = "household_id";
  schema.columns.formal_income = "formal_income";
  schema.columns.collection_date = "collection_date";
  return schema;
}

absl::StatusOr<SyntheticSurvey> GenerateSynthetic(
    const SyntheticOptions& options) {
  tabular::Schema schema = SyntheticSchema();
  const size_t n = options.rows;
  Rng rng(options.seed);
  std::vector<std::vector<double>> columns(kNumColumns, std::vector<double>(n));
  std::vector<double> income(n);
  tabular::RowMetadata meta;
  meta.formal_income.resize(n);
  meta.collection_date.resize(n);

  for (size_t i = 0; i < n; ++i) {
    const int age = rng.Between(18, 90);
    const int age_bin = age < 25 ? 0 : age < 45 ? 1 : age < 65 ? 2 : 3;
    static constexpr double kFormalRate[] = {0.25, 0.55, 0.5, 0.15};
    const bool formal = rng.Bernoulli(kFormalRate[age_bin]);
    const int size =
        1 + static_cast<int>(std::floor(std::pow(rng.Uniform(), 1.6) * 9));
    const bool female = rng.Bernoulli(0.4);
    const int region = rng.Choice({0.35, 0.3, 0.2, 0.15});
    const bool rural = region >= 2;

    double school_mean = formal ? 11.5 : 7.0;
    if (rural) school_mean -= 2.0;
    if (age_bin == 3) school_mean -= 2.0;
    int schooling = static_cast<int>(
        std::lround(school_mean + 3.0 * rng.Normal()));
    schooling = std::clamp(schooling, 0, age_bin == 0 ? 16 : 20);
    const int education =
        schooling <= 2 ? 0 : schooling <= 6 ? 1 : schooling <= 12 ? 2 : 3;

    enum { kEmployed, kUnemployed, kInactive, kRetired };
    int labor;
    if (age_bin == 3) {
      labor = formal ? (rng.Bernoulli(0.4) ? kEmployed : kRetired)
                     : rng.Choice({0.15, 0.0, 0.25, 0.6});
    } else {
      labor = formal ? kEmployed : rng.Choice({0.6, 0.2, 0.2});
    }
    int sector = 4;  // none
    if (labor == kEmployed) {
      sector = formal ? 1 + rng.Choice({0.35, 0.4, 0.25})
                      : rng.Choice({rural ? 0.6 : 0.2, 0.25});
      if (!formal && sector == 1 && rng.Bernoulli(0.5)) sector = 2;
    }
    bool pension = false;
    if (formal) pension = rng.Bernoulli(0.7);
    if (age_bin == 3) pension = pension || rng.Bernoulli(0.5);

    const int earners =
        std::min({size, 5, (labor == kEmployed ? 1 : 0) + rng.Between(0, 2)});
    const int hours =
        labor == kEmployed
            ? std::clamp(static_cast<int>(std::lround(40 + 10 * rng.Normal())),
                         4, 70)
            : 0;

    const double wealth = rng.Normal() + 0.12 * (schooling - 8) +
                          (formal ? 0.5 : 0.0) - (rural ? 0.5 : 0.0);
    auto has = [&](double offset) {
      return rng.Uniform() < 1.0 / (1.0 + std::exp(-(wealth + offset)));
    };
    const int rooms = std::clamp(
        static_cast<int>(std::lround(3 + 1.2 * wealth + 0.25 * size +
                                     0.8 * rng.Normal())),
        1, 8);
    const int floor = std::clamp(
        static_cast<int>(std::lround(1.6 + 0.9 * wealth + 0.5 * rng.Normal())),
        0, 3);
    const bool water = has(2.0);
    const bool sewage = has(rural ? -0.5 : 1.0);
    const bool electricity = has(3.0);
    const bool internet = has(-0.3);
    const bool car = has(-1.2);
    const bool fridge = has(1.5);
    const bool tv = has(2.0);
    const bool computer = has(-0.6);
    const int phones = std::clamp(
        static_cast<int>(std::lround(1 + 0.35 * size + 0.6 * wealth +
                                     0.7 * rng.Normal())),
        0, 6);
    const bool washer = has(0.2);

    static constexpr double kRegionEffect[] = {60, 30, -20, -35};
    double y = 140 + 14.0 * schooling + 70.0 * formal +
               4.0 * schooling * formal + 45.0 * pension - 18.0 * size +
               kRegionEffect[region] - 12.0 * female + 25.0 * rooms +
               30.0 * floor + 20.0 * water + 15.0 * sewage + 10.0 * electricity +
               25.0 * internet + 90.0 * car + 20.0 * fridge + 8.0 * tv +
               35.0 * computer + 10.0 * phones + 15.0 * washer + 0.8 * hours +
               30.0 * earners + 40.0 * rng.Normal();
    y = std::round(std::max(y, 5.0) * 100) / 100;

    const double row[kNumColumns] = {
        double(age),   double(size),     double(female),      double(region),
        double(schooling), double(education), double(formal), double(labor),
        double(sector), double(pension), double(earners),     double(hours),
        double(rooms), double(floor),    double(water),       double(sewage),
        double(electricity), double(internet), double(car),   double(fridge),
        double(tv),    double(computer), double(phones),      double(washer)};
    for (int c = 0; c < kNumColumns; ++c) columns[c][i] = row[c];
    // Survey non-response on a few questions outside the rule.
    for (const int c : {kHours, kFloor, kInternet, kPhones}) {
      if (rng.Bernoulli(options.missing_rate)) columns[c][i] = kMissing;
    }
    income[i] = y;

    char id[24];
    std::snprintf(id, sizeof(id), "H%05zu", i + 1);
    meta.ids.push_back(id);
    if (formal) meta.formal_income[i] = std::round(0.7 * y * 100) / 100;
    const int day = rng.Between(0, 364);
    static constexpr int kMonthDays[] = {31, 28, 31, 30, 31, 30,
                                         31, 31, 30, 31, 30, 31};
    int month = 0;
    int rest = day;
    while (rest >= kMonthDays[month]) rest -= kMonthDays[month++];
    char date[32];
    std::snprintf(date, sizeof(date), "2025-%02d-%02d", month + 1, rest + 1);
    meta.collection_date[i] = date;
  }

  POVEX_ASSIGN_OR_RETURN(
      auto dataset,
      tabular::Dataset::Create(schema.features, std::move(columns),
                               std::move(income), std::move(meta),
                               absl::StrCat("synthetic:seed=", options.seed,
                                            ",rows=", n)));
  return SyntheticSurvey{std::move(schema), std::move(dataset)};
}

}  // namespace povex::app
