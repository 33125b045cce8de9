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

#include "tests/support/toy.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "povex/hash.h"
#include "povex/tabular/schema.h"

namespace povex::testing {

using tabular::FeatureKind;
using tabular::FeatureSchema;
using tabular::Household;
using tabular::IsMissing;
using tabular::kMissing;
using tabular::SameValue;

namespace {

template <typename T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) throw std::runtime_error(std::string(value.status().message()));
  return std::move(value).value();
}

double Uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

int Pick(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

std::shared_ptr<const predictor::PredictorModel> MakeWavyModel(size_t width,
                                                               uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> a(width), b(width), phase(width), cross(width);
  for (size_t c = 0; c < width; ++c) {
    a[c] = Uniform(rng) * 2 - 1;
    b[c] = 0.3 + Uniform(rng);
    phase[c] = Uniform(rng) * 3;
    cross[c] = (Uniform(rng) - 0.5) * 0.2;
  }
  const double base = Uniform(rng);
  auto fn = [=](std::span<const double> x) {
    double y = base;
    for (size_t c = 0; c < x.size(); ++c) {
      y += a[c] * std::sin(b[c] * x[c] + phase[c]);
      if (c + 1 < x.size()) y += cross[c] * x[c] * x[c + 1];
    }
    return y;
  };
  return std::make_shared<predictor::FunctionModel>(fn, "wavy");
}

ToyProblem MakeToyProblem(uint64_t seed, const ToyOptions& options) {
  std::mt19937_64 rng(seed ^ 0x70f1e5ULL);
  const size_t d = std::clamp<size_t>(options.d, 1, 3);
  const size_t n = static_cast<size_t>(Pick(rng, 8, static_cast<int>(options.max_rows)));

  std::vector<FeatureSchema> features;
  {
    FeatureSchema f;
    f.name = "x0";
    f.kind = FeatureKind::kNumeric;
    features.push_back(f);
  }
  if (d >= 2) {
    FeatureSchema f;
    f.name = "x1";
    f.kind = FeatureKind::kCategorical;
    const int k = Pick(rng, 2, 3);
    for (int c = 0; c < k; ++c) f.categories.push_back(std::string(1, 'a' + c));
    features.push_back(f);
  }
  if (d >= 3) {
    FeatureSchema f;
    f.name = "x2";
    f.kind = Pick(rng, 0, 1) ? FeatureKind::kBoolean : FeatureKind::kNumeric;
    if (f.kind == FeatureKind::kBoolean) f.categories = {"0", "1"};
    features.push_back(f);
  }

  // Up to four distinct values per numeric column.
  auto numeric_support = [&] {
    std::vector<double> v;
    const int k = Pick(rng, 1, 4);
    while (static_cast<int>(v.size()) < k) {
      const double x = Pick(rng, 0, 10) * 0.5;
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    }
    return v;
  };
  std::vector<std::vector<double>> support(d);
  for (size_t j = 0; j < d; ++j) {
    if (features[j].is_discrete()) {
      for (size_t c = 0; c < features[j].categories.size(); ++c) {
        support[j].push_back(static_cast<double>(c));
      }
    } else {
      support[j] = numeric_support();
    }
  }

  const double line = 50.0;
  std::vector<std::vector<double>> columns(d, std::vector<double>(n));
  std::vector<double> income(n);
  const double missing_rate = options.with_missing ? 0.1 : 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      const auto& s = support[j];
      double v = s[static_cast<size_t>(Pick(rng, 0, static_cast<int>(s.size()) - 1))];
      // The first rows stay complete so every column keeps observed values,
      // also below the poverty line.
      if (i >= 4 && Uniform(rng) < missing_rate) v = kMissing;
      columns[j][i] = v;
    }
    income[i] = i < 4 ? Uniform(rng) * line : Uniform(rng) * 100;
  }

  tabular::RowMetadata meta;
  for (size_t i = 0; i < n; ++i) meta.ids.push_back("t" + std::to_string(i));
  meta.formal_income.assign(n, std::nullopt);
  meta.collection_date.assign(n, std::nullopt);

  ToyProblem problem{
      Unwrap(tabular::Dataset::Create(features, columns, income, meta, "toy")),
      {},
      {},
      nullptr,
      {}};
  problem.poverty.poverty_line = line;
  problem.poverty.min_contrastive_rows = 1;

  if (options.with_rule && d >= 2) {
    tabular::ConditionalitySpec spec;
    spec.name = "toy_rule";
    if (Pick(rng, 0, 1) == 0) {
      tabular::DriverPartitionSpec driver;
      driver.feature = "x0";
      driver.cuts = {Pick(rng, 1, 9) * 0.5};
      spec.drivers.push_back(driver);
      spec.dependents.push_back("x1");
      if (d >= 3) spec.dependents.push_back("x2");
    } else {
      tabular::DriverPartitionSpec driver;
      driver.feature = "x1";
      spec.drivers.push_back(driver);
      spec.dependents.push_back("x0");
    }
    problem.rules = Unwrap(tabular::ResolveRules({spec}, features, ""));
  }
  problem.pipeline = Unwrap(predictor::PreprocessPipeline::Fit(problem.dataset));
  problem.model = MakeWavyModel(problem.pipeline.width(), seed * 7 + 1);
  return problem;
}

namespace {

// Reference table seen by one algorithm.
struct Reference {
  std::vector<std::vector<double>> columns;  // [feature][row]
  std::vector<FeatureSchema> features;
  size_t rows = 0;
};

struct Marginal {
  std::vector<double> values;
  std::vector<double> weights;
};

Marginal OracleMarginal(const Reference& ref, size_t j) {
  const bool discrete = ref.features[j].is_discrete();
  std::map<double, size_t> counts;
  size_t missing = 0;
  for (size_t i = 0; i < ref.rows; ++i) {
    const double v = ref.columns[j][i];
    if (IsMissing(v)) {
      ++missing;
    } else {
      ++counts[v];
    }
  }
  size_t total = 0;
  for (const auto& [v, c] : counts) total += c;
  if (discrete) total += missing;
  Marginal m;
  for (const auto& [v, c] : counts) {
    m.values.push_back(v);
    m.weights.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  if (discrete && missing > 0) {
    m.values.push_back(kMissing);
    m.weights.push_back(static_cast<double>(missing) / static_cast<double>(total));
  }
  return m;
}

std::optional<size_t> IndexIn(const Marginal& m, double x) {
  for (size_t i = 0; i < m.values.size(); ++i) {
    if (SameValue(m.values[i], x)) return i;
  }
  return std::nullopt;
}

struct PairEntry {
  size_t a, b;
  double weight;
};

std::vector<PairEntry> OracleJoint(const Reference& ref, size_t j, size_t k,
                                   const Marginal& mj, const Marginal& mk) {
  std::map<std::pair<size_t, size_t>, size_t> counts;
  size_t total = 0;
  for (size_t i = 0; i < ref.rows; ++i) {
    const auto a = IndexIn(mj, ref.columns[j][i]);
    const auto b = IndexIn(mk, ref.columns[k][i]);
    if (!a || !b) continue;
    ++counts[{*a, *b}];
    ++total;
  }
  std::vector<PairEntry> out;
  for (const auto& [p, c] : counts) {
    out.push_back({p.first, p.second,
                   static_cast<double>(c) / static_cast<double>(total)});
  }
  return out;
}

// Subset label of the toy rule's single driver.
std::optional<size_t> OracleSubset(const tabular::ConditionalityRule& rule,
                                   const std::vector<double>& values) {
  size_t subset = 0;
  for (const auto& p : rule.drivers) {
    const double v = values[p.feature];
    size_t bin;
    if (IsMissing(v)) {
      if (p.missing_bin < 0) return std::nullopt;
      bin = static_cast<size_t>(p.missing_bin);
    } else if (p.numeric) {
      bin = 0;
      for (const double c : p.cuts) {
        if (v >= c) ++bin;
      }
    } else {
      bin = static_cast<size_t>(v);
    }
    subset = subset * static_cast<size_t>(p.num_bins) + bin;
  }
  return subset;
}

// Draws dependents of every rule with a driver among `changed`.
void OracleResample(const Reference& ref,
                    const std::vector<tabular::ConditionalityRule>& rules,
                    std::vector<double>& values,
                    const std::vector<size_t>& changed, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const auto& rule : rules) {
    bool triggered = false;
    for (const size_t c : changed) {
      for (const auto& p : rule.drivers) triggered |= p.feature == c;
    }
    if (!triggered) continue;
    const auto subset = OracleSubset(rule, values);
    for (const size_t dep : rule.dependents) {
      const bool discrete = ref.features[dep].is_discrete();
      auto collect = [&](bool restrict) {
        std::map<double, size_t> counts;
        size_t missing = 0;
        for (size_t i = 0; i < ref.rows; ++i) {
          if (restrict) {
            std::vector<double> row(ref.columns.size());
            for (size_t f = 0; f < row.size(); ++f) row[f] = ref.columns[f][i];
            if (OracleSubset(rule, row) != subset) continue;
          }
          const double v = ref.columns[dep][i];
          if (IsMissing(v)) {
            ++missing;
          } else {
            ++counts[v];
          }
        }
        std::vector<std::pair<double, size_t>> dist(counts.begin(), counts.end());
        if (discrete && missing > 0) dist.emplace_back(kMissing, missing);
        return dist;
      };
      auto dist = subset ? collect(true) : decltype(collect(true)){};
      if (dist.empty()) dist = collect(false);
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (dist.empty()) continue;
      size_t total = 0;
      for (const auto& [v, c] : dist) total += c;
      const double target = u * static_cast<double>(total);
      size_t running = 0;
      size_t pick = dist.size() - 1;
      for (size_t i = 0; i < dist.size(); ++i) {
        running += dist[i].second;
        if (static_cast<double>(running) > target) {
          pick = i;
          break;
        }
      }
      values[dep] = dist[pick].first;
    }
  }
}

}  // namespace

std::vector<double> OracleImportances(const ToyProblem& problem,
                                      engine::Algorithm algorithm,
                                      const Household& focal, uint64_t seed,
                                      int resamples) {
  using engine::Algorithm;
  const auto& data = problem.dataset;
  const size_t d = data.num_features();

  Reference ref;
  ref.features = data.features();
  ref.columns.resize(d);
  for (size_t i = 0; i < data.num_rows(); ++i) {
    if (algorithm == Algorithm::kContrastive &&
        !(data.income()[i] < problem.poverty.poverty_line)) {
      continue;
    }
    for (size_t j = 0; j < d; ++j) ref.columns[j].push_back(data.value(i, j));
    ++ref.rows;
  }
  const bool conditional = algorithm != Algorithm::kUnivariate;
  const bool pairs =
      algorithm == Algorithm::kBivariate || algorithm == Algorithm::kContrastive;
  const std::vector<tabular::ConditionalityRule> no_rules;
  const auto& rules = conditional ? problem.rules : no_rules;

  auto predict = [&](const std::vector<double>& values) {
    Household h;
    h.values = values;
    return Unwrap(predictor::Predict(*problem.model, problem.pipeline, h));
  };
  const double y = predict(focal.values);

  std::vector<Marginal> marginals;
  std::vector<std::optional<size_t>> own;
  for (size_t j = 0; j < d; ++j) {
    marginals.push_back(OracleMarginal(ref, j));
    own.push_back(IndexIn(marginals[j], focal.values[j]));
  }
  bool has_driver[3] = {false, false, false};
  for (const auto& rule : rules) {
    for (const auto& p : rule.drivers) has_driver[p.feature] = true;
  }

  // Weighted sum over one (first, second) block of replacements.
  auto block = [&](size_t first, size_t second,
                   const std::vector<PairEntry>& entries) {
    double sum = 0;
    for (const auto& e : entries) {
      std::vector<double> values = focal.values;
      std::vector<size_t> changed;
      if (own[first] != e.a) {
        values[first] = marginals[first].values[e.a];
        changed.push_back(first);
      }
      if (second != first && own[second] != e.b) {
        values[second] = marginals[second].values[e.b];
        changed.push_back(second);
      }
      if (changed.empty()) continue;
      bool triggered = false;
      for (const size_t c : changed) triggered |= has_driver[c];
      double delta = 0;
      if (!triggered) {
        delta = y - predict(values);
      } else {
        for (int r = 0; r < resamples; ++r) {
          std::vector<double> copy = values;
          OracleResample(ref, rules, copy, changed,
                         DeriveSeed(seed, {first, second, e.a, e.b,
                                           static_cast<uint64_t>(r)}));
          delta += y - predict(copy);
        }
        delta /= resamples;
      }
      sum += e.weight * delta;
    }
    return sum;
  };
  auto diagonal = [&](size_t j) {
    std::vector<PairEntry> entries;
    for (size_t v = 0; v < marginals[j].values.size(); ++v) {
      entries.push_back({v, v, marginals[j].weights[v]});
    }
    return entries;
  };

  std::vector<double> out(d, 0.0);
  for (size_t j = 0; j < d; ++j) {
    if (!pairs) {
      out[j] = block(j, j, diagonal(j));
      continue;
    }
    double total = 0;
    for (size_t k = 0; k < d; ++k) {
      if (k == j) {
        total += block(j, j, diagonal(j));
      } else {
        const size_t a = std::min(j, k);
        const size_t b = std::max(j, k);
        total += block(a, b, OracleJoint(ref, a, b, marginals[a], marginals[b]));
      }
    }
    out[j] = total / static_cast<double>(d);
  }
  return out;
}

}  // namespace povex::testing
