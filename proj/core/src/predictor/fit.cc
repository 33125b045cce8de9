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

#include "povex/predictor/fit.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "absl/strings/str_cat.h"
#include "povex/hash.h"
#include "povex/status.h"

namespace povex::predictor {

using nlohmann::json;

namespace {

// Encoded design, row-major.
absl::StatusOr<std::vector<double>> EncodeAll(const tabular::Dataset& dataset,
                                              const PreprocessPipeline& pipeline) {
  const size_t n = dataset.num_rows();
  const size_t width = pipeline.width();
  if (pipeline.raw_width() != dataset.num_features()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "pipeline raw width differs from the dataset");
  }
  std::vector<double> encoded(n * width);
  std::vector<double> raw(dataset.num_features());
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < raw.size(); ++j) raw[j] = dataset.value(i, j);
    const absl::Status status = pipeline.Encode(
        raw, std::span<double>(encoded).subspan(i * width, width));
    if (!status.ok()) {
      return MakeError(ErrorKind::kEncodingError,
                       absl::StrCat("row ", i, ": ", status.message()));
    }
  }
  return encoded;
}

std::string TrainingFingerprint(const tabular::Dataset& dataset,
                                const PreprocessPipeline& pipeline,
                                absl::string_view params) {
  return HexDigest(Fnv1a64()
                       .U64(dataset.ContentHash())
                       .Str(pipeline.Fingerprint())
                       .Str(params)
                       .digest());
}

}  // namespace

absl::StatusOr<LinearModel> FitLinear(const tabular::Dataset& dataset,
                                      const PreprocessPipeline& pipeline,
                                      const LinearFitOptions& options) {
  if (options.ridge < 0) {
    return MakeError(ErrorKind::kInvalidParams, "ridge must be >= 0");
  }
  POVEX_ASSIGN_OR_RETURN(std::vector<double> encoded, EncodeAll(dataset, pipeline));
  const auto n = static_cast<Eigen::Index>(dataset.num_rows());
  const auto p = static_cast<Eigen::Index>(pipeline.width());
  Eigen::MatrixXd x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                     Eigen::Dynamic, Eigen::RowMajor>>(
      encoded.data(), n, p);
  const auto income = dataset.income();
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(income.data(), n);

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean;
  y.array() -= y_mean;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double lambda = options.ridge;
  if (p > 0 && lambda == 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() == p) {
      beta = qr.solve(y);
    } else if (!options.ridge_fallback) {
      return MakeError(ErrorKind::kDegenerateDesign,
                       absl::StrCat("design has rank ", qr.rank(), " < ", p,
                                    " and ridge is disabled"));
    } else {
      lambda = kRidgeFallback;
    }
  }
  if (p > 0 && lambda > 0) {
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    beta = gram.ldlt().solve(x.transpose() * y);
  }
  const double intercept = y_mean - x_mean.dot(beta);
  std::vector<double> coefficients(beta.data(), beta.data() + p);
  return LinearModel(std::move(coefficients), intercept,
                     TrainingFingerprint(dataset, pipeline,
                                         absl::StrCat("linear;ridge=", lambda)));
}

TreeEnsembleModel::TreeEnsembleModel(double base_score,
                                     std::vector<std::vector<TreeNode>> trees,
                                     size_t width,
                                     std::string training_fingerprint)
    : base_score_(base_score),
      trees_(std::move(trees)),
      width_(width),
      training_fingerprint_(std::move(training_fingerprint)) {}

double TreeEnsembleModel::PredictRow(const double* x) const {
  double y = base_score_;
  for (const auto& tree : trees_) {
    int node = 0;
    while (tree[node].feature >= 0) {
      node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left
                                                           : tree[node].right;
    }
    y += tree[node].value;
  }
  return y;
}

absl::Status TreeEnsembleModel::PredictBatch(std::span<const double> rows,
                                             size_t width,
                                             std::span<double> out) const {
  if (width != width_ || rows.size() != width * out.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("tree ensemble expects width ", width_));
  }
  for (size_t i = 0; i < out.size(); ++i) out[i] = PredictRow(rows.data() + i * width);
  return absl::OkStatus();
}

std::string TreeEnsembleModel::model_id() const {
  Fnv1a64 h;
  h.Str("tree_ensemble").F64(base_score_).U64(width_);
  for (const auto& tree : trees_) {
    h.U64(tree.size());
    for (const auto& n : tree) {
      h.U64(static_cast<uint64_t>(n.feature)).F64(n.threshold);
      h.U64(static_cast<uint64_t>(n.left)).U64(static_cast<uint64_t>(n.right));
      h.F64(n.value);
    }
  }
  return absl::StrCat("tree_ensemble:", HexDigest(h.digest()));
}

std::optional<json> TreeEnsembleModel::ToJson() const {
  json trees = json::array();
  for (const auto& tree : trees_) {
    json nodes = json::array();
    for (const auto& n : tree) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    }
    trees.push_back(nodes);
  }
  return json{{"model_version", 1},
              {"kind", "tree_ensemble"},
              {"base_score", base_score_},
              {"width", width_},
              {"trees", trees},
              {"training_fingerprint", training_fingerprint_}};
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const std::vector<std::vector<uint16_t>>& bins,
             const std::vector<std::vector<double>>& cuts,
             const std::vector<double>& residual, const TreeEnsembleParams& params)
      : bins_(bins), cuts_(cuts), residual_(residual), params_(params) {}

  std::vector<TreeNode> Grow(std::vector<size_t> rows) {
    nodes_.clear();
    Split(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int Split(std::vector<size_t> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    const size_t min_leaf = static_cast<size_t>(std::max(1, params_.min_leaf_rows));
    if (depth >= params_.max_depth || rows.size() < 2 * min_leaf) return id;

    double total = 0;
    for (const size_t r : rows) total += residual_[r];
    const double count = static_cast<double>(rows.size());
    const double parent_score = total * total / count;

    double best_gain = 0;
    int best_feature = -1;
    size_t best_bin = 0;
    std::vector<double> sum;
    std::vector<size_t> cnt;
    for (size_t f = 0; f < bins_.size(); ++f) {
      const size_t num_bins = cuts_[f].size() + 1;
      if (num_bins < 2) continue;
      sum.assign(num_bins, 0.0);
      cnt.assign(num_bins, 0);
      const auto& column = bins_[f];
      for (const size_t r : rows) {
        sum[column[r]] += residual_[r];
        ++cnt[column[r]];
      }
      double left_sum = 0;
      size_t left_cnt = 0;
      for (size_t b = 0; b + 1 < num_bins; ++b) {
        left_sum += sum[b];
        left_cnt += cnt[b];
        const size_t right_cnt = rows.size() - left_cnt;
        if (left_cnt < min_leaf || right_cnt < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(left_cnt) +
                            right_sum * right_sum / static_cast<double>(right_cnt) -
                            parent_score;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_bin = b;
        }
      }
    }
    if (best_feature < 0 || best_gain <= 1e-12 * (std::abs(parent_score) + 1)) {
      return id;
    }
    std::vector<size_t> left;
    std::vector<size_t> right;
    const auto& column = bins_[static_cast<size_t>(best_feature)];
    for (const size_t r : rows) {
      (column[r] <= best_bin ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = cuts_[static_cast<size_t>(best_feature)][best_bin];
    const int l = Split(std::move(left), depth + 1);
    const int r = Split(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  const std::vector<std::vector<uint16_t>>& bins_;
  const std::vector<std::vector<double>>& cuts_;
  const std::vector<double>& residual_;
  const TreeEnsembleParams& params_;
  std::vector<TreeNode> nodes_;
};

uint64_t BoundedDraw(std::mt19937_64& rng, uint64_t range) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(rng()) * range) >> 64);
}

}  // namespace

absl::StatusOr<TreeEnsembleModel> FitTreeEnsemble(
    const tabular::Dataset& dataset, const PreprocessPipeline& pipeline,
    const TreeEnsembleParams& params) {
  if (params.trees < 1 || params.max_depth < 0 || params.max_depth > 30 ||
      !(params.learning_rate > 0 && params.learning_rate <= 1) ||
      !(params.bag_fraction > 0 && params.bag_fraction <= 1) ||
      params.min_leaf_rows < 1 || params.histogram_bins < 2 ||
      params.histogram_bins > 65535) {
    return MakeError(ErrorKind::kInvalidParams,
                     "tree ensemble needs trees >= 1, 0 <= max_depth <= 30, "
                     "learning_rate and bag_fraction in (0, 1], "
                     "min_leaf_rows >= 1, 2 <= histogram_bins <= 65535");
  }
  POVEX_ASSIGN_OR_RETURN(std::vector<double> encoded, EncodeAll(dataset, pipeline));
  const size_t n = dataset.num_rows();
  const size_t width = pipeline.width();

  // Per-column thresholds and bin codes: x <= cuts[b] iff bin(x) <= b.
  std::vector<std::vector<double>> cuts(width);
  std::vector<std::vector<uint16_t>> bins(width, std::vector<uint16_t>(n));
  std::vector<double> column(n);
  for (size_t c = 0; c < width; ++c) {
    for (size_t i = 0; i < n; ++i) column[i] = encoded[i * width + c];
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct;
    for (const double v : sorted) {
      if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
    }
    const auto max_bins = static_cast<size_t>(params.histogram_bins);
    if (distinct.size() <= max_bins) {
      cuts[c].assign(distinct.begin(), distinct.end() - (distinct.empty() ? 0 : 1));
    } else {
      for (size_t b = 1; b < max_bins; ++b) {
        const double cut = sorted[b * n / max_bins];
        if (cut < sorted.back() && (cuts[c].empty() || cut > cuts[c].back())) {
          cuts[c].push_back(cut);
        }
      }
    }
    for (size_t i = 0; i < n; ++i) {
      bins[c][i] = static_cast<uint16_t>(
          std::lower_bound(cuts[c].begin(), cuts[c].end(), column[i]) -
          cuts[c].begin());
    }
  }

  const auto income = dataset.income();
  double base = 0;
  for (const double y : income) base += y;
  base /= static_cast<double>(n);
  std::vector<double> prediction(n, base);
  std::vector<double> residual(n);

  std::mt19937_64 rng(params.seed);
  const size_t bag_size = std::max<size_t>(
      1, static_cast<size_t>(std::llround(params.bag_fraction * static_cast<double>(n))));
  std::vector<size_t> order(n);
  std::vector<std::vector<TreeNode>> trees;
  TreeGrower grower(bins, cuts, residual, params);
  for (int t = 0; t < params.trees; ++t) {
    for (size_t i = 0; i < n; ++i) residual[i] = income[i] - prediction[i];
    for (size_t i = 0; i < n; ++i) order[i] = i;
    if (bag_size < n) {
      for (size_t i = 0; i < bag_size; ++i) {
        std::swap(order[i], order[i + BoundedDraw(rng, n - i)]);
      }
      std::sort(order.begin(), order.begin() + static_cast<long>(bag_size));
    }
    std::vector<TreeNode> tree =
        grower.Grow(std::vector<size_t>(order.begin(), order.begin() + static_cast<long>(bag_size)));

    // Leaf values from all rows.
    std::vector<double> leaf_sum(tree.size(), 0.0);
    std::vector<size_t> leaf_cnt(tree.size(), 0);
    std::vector<int> leaf_of(n);
    for (size_t i = 0; i < n; ++i) {
      int node = 0;
      while (tree[node].feature >= 0) {
        node = encoded[i * width + static_cast<size_t>(tree[node].feature)] <=
                       tree[node].threshold
                   ? tree[node].left
                   : tree[node].right;
      }
      leaf_of[i] = node;
      leaf_sum[node] += residual[i];
      ++leaf_cnt[node];
    }
    for (size_t k = 0; k < tree.size(); ++k) {
      if (tree[k].feature < 0 && leaf_cnt[k] > 0) {
        tree[k].value = params.learning_rate * leaf_sum[k] /
                        static_cast<double>(leaf_cnt[k]);
      }
    }
    for (size_t i = 0; i < n; ++i) prediction[i] += tree[leaf_of[i]].value;
    trees.push_back(std::move(tree));
  }
  const std::string params_tag = absl::StrCat(
      "tree;trees=", params.trees, ";depth=", params.max_depth, ";lr=",
      params.learning_rate, ";bag=", params.bag_fraction, ";min_leaf=",
      params.min_leaf_rows, ";hist=", params.histogram_bins, ";seed=", params.seed);
  return TreeEnsembleModel(base, std::move(trees), width,
                           TrainingFingerprint(dataset, pipeline, params_tag));
}

}  // namespace povex::predictor
