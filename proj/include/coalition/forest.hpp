#pragma once

// Regression trees grown by greedy variance-reduction splits, bagged into a
// forest. Everything is deterministic for a given (data, config, seed):
// candidate thresholds sit at midpoints between adjacent distinct feature
// values, ties on reduction break toward the lowest feature index and then
// the lowest threshold, and every tree draws from its own RNG stream derived
// as seed XOR tree-index through the generator's initialization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coalition/data.hpp"
#include "coalition/error.hpp"
#include "coalition/parallel.hpp"
#include "coalition/rng.hpp"

namespace coalition {

struct ForestConfig {
  int n_trees = 100;
  std::optional<int> max_depth{};  // empty = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  double features_per_split = 1.0;  // fraction of features scanned per node
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_trees < 1) raise(errc::validation, "n_trees must be at least 1");
    if (min_samples_split < 2) raise(errc::validation, "min_samples_split must be at least 2");
    if (min_samples_leaf < 1) raise(errc::validation, "min_samples_leaf must be at least 1");
    if (max_depth && *max_depth < 0) raise(errc::validation, "max_depth must be non-negative");
    if (!(features_per_split > 0.0) || features_per_split > 1.0) {
      raise(errc::validation, "features_per_split must be in (0, 1]");
    }
  }
};

// feature_index < 0 marks a leaf carrying the mean target of its training rows.
struct TreeNode {
  int feature_index = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature_index < 0; }
};

class RegressionTree {
 public:
  RegressionTree(std::vector<TreeNode> nodes, int feature_count)
      : nodes_(std::move(nodes)), feature_count_(feature_count) {}

  double predict_row(std::span<const double> row) const {
    const TreeNode* node = nodes_.data();
    while (!node->is_leaf()) {
      node = nodes_.data() +
             (row[static_cast<std::size_t>(node->feature_index)] <= node->threshold
                  ? node->left
                  : node->right);
    }
    return node->value;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int feature_count() const { return feature_count_; }

 private:
  std::vector<TreeNode> nodes_;
  int feature_count_;
};

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double reduction = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DataMatrix& X, const std::vector<double>& y,
              const ForestConfig& config, RngState& rng)
      : X_(X), y_(y), config_(config), rng_(rng) {
    const std::size_t p = X.col_count();
    feature_slots_.resize(p);
    const auto wanted = static_cast<std::size_t>(config.features_per_split * static_cast<double>(p));
    features_per_node_ = std::clamp<std::size_t>(wanted, 1, p);
  }

  RegressionTree build(std::vector<std::size_t> rows) {
    nodes_.clear();
    grow(std::move(rows), 0);
    return RegressionTree(std::move(nodes_), static_cast<int>(X_.col_count()));
  }

 private:
  int grow(std::vector<std::size_t> rows, int depth) {
    const std::size_t m = rows.size();
    double sum = 0.0;
    for (std::size_t r : rows) sum += y_[r];
    const double mean = sum / static_cast<double>(m);

    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[index].value = mean;

    if (static_cast<int>(m) < config_.min_samples_split) return index;
    if (config_.max_depth && depth >= *config_.max_depth) return index;

    double y_min = y_[rows[0]], y_max = y_[rows[0]];
    for (std::size_t r : rows) {
      y_min = std::min(y_min, y_[r]);
      y_max = std::max(y_max, y_[r]);
    }
    if (y_min == y_max) return index;  // pure node

    const SplitChoice split = best_split(rows, mean);
    if (split.feature < 0) return index;

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(m);
    right_rows.reserve(m);
    for (std::size_t r : rows) {
      (X_.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold
           ? left_rows
           : right_rows)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes_[index].feature_index = split.feature;
    nodes_[index].threshold = split.threshold;
    const int left = grow(std::move(left_rows), depth + 1);
    const int right = grow(std::move(right_rows), depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
  }

  // Scans candidate features in ascending index order; within a feature,
  // thresholds ascend, and only strictly better reductions replace the
  // incumbent, which realizes the documented tie-breaking.
  SplitChoice best_split(const std::vector<std::size_t>& rows, double mean) {
    const std::size_t m = rows.size();
    const std::size_t p = X_.col_count();

    std::span<const int> candidates = candidate_features(p);

    // Targets are centered on the node mean before the sum-of-squares
    // sweep; the raw sums cancel badly once the mean dwarfs the spread.
    double total_sum = 0.0, total_sq = 0.0;
    for (std::size_t r : rows) {
      const double yc = y_[r] - mean;
      total_sum += yc;
      total_sq += yc * yc;
    }
    const double parent_sse = total_sq - total_sum * total_sum / static_cast<double>(m);

    SplitChoice best;
    for (int f : candidates) {
      scratch_.clear();
      scratch_.reserve(m);
      for (std::size_t r : rows) {
        scratch_.emplace_back(X_.at(r, static_cast<std::size_t>(f)), y_[r] - mean);
      }
      std::sort(scratch_.begin(), scratch_.end());

      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t i = 1; i < m; ++i) {
        left_sum += scratch_[i - 1].second;
        left_sq += scratch_[i - 1].second * scratch_[i - 1].second;
        if (scratch_[i].first == scratch_[i - 1].first) continue;
        const auto nl = static_cast<double>(i);
        const auto nr = static_cast<double>(m - i);
        if (i < static_cast<std::size_t>(config_.min_samples_leaf) ||
            m - i < static_cast<std::size_t>(config_.min_samples_leaf)) {
          continue;
        }
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse = (left_sq - left_sum * left_sum / nl) +
                           (right_sq - right_sum * right_sum / nr);
        const double reduction = parent_sse - sse;
        if (reduction > best.reduction) {
          best.feature = f;
          best.threshold = 0.5 * (scratch_[i - 1].first + scratch_[i].first);
          best.reduction = reduction;
        }
      }
    }
    return best;
  }

  std::span<const int> candidate_features(std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) feature_slots_[j] = static_cast<int>(j);
    if (features_per_node_ == p) return feature_slots_;
    // partial Fisher-Yates, then ascending order so the tie-break holds
    for (std::size_t i = 0; i < features_per_node_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.next_below(p - i));
      std::swap(feature_slots_[i], feature_slots_[j]);
    }
    std::sort(feature_slots_.begin(), feature_slots_.begin() + static_cast<std::ptrdiff_t>(features_per_node_));
    return {feature_slots_.data(), features_per_node_};
  }

  const DataMatrix& X_;
  const std::vector<double>& y_;
  const ForestConfig& config_;
  RngState& rng_;
  std::vector<int> feature_slots_;
  std::size_t features_per_node_ = 0;
  std::vector<std::pair<double, double>> scratch_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

inline RegressionTree fit_tree(const DataMatrix& X, const TargetVector& y,
                               const ForestConfig& config, RngState& rng) {
  config.validate();
  if (y.values.size() != X.row_count()) {
    raise(errc::schema_mismatch, "target length does not match feature rows");
  }
  require_finite(y);
  if (X.row_count() == 0) raise(errc::insufficient_data, "cannot fit a tree on no rows");

  std::vector<std::size_t> rows(X.row_count());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  detail::TreeBuilder builder(X, y.values, config, rng);
  return builder.build(std::move(rows));
}

class ForestModel {
 public:
  ForestModel(std::vector<RegressionTree> trees, ForestConfig config)
      : trees_(std::move(trees)), config_(config) {
    if (trees_.empty()) raise(errc::validation, "forest needs at least one tree");
    for (const auto& tree : trees_) {
      if (tree.feature_count() != trees_.front().feature_count()) {
        raise(errc::validation, "forest trees disagree on feature count");
      }
    }
  }

  double predict_row(std::span<const double> row) const {
    double acc = 0.0;
    for (const auto& tree : trees_) acc += tree.predict_row(row);
    return acc / static_cast<double>(trees_.size());
  }

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const ForestConfig& config() const { return config_; }
  int feature_count() const { return trees_.front().feature_count(); }

 private:
  std::vector<RegressionTree> trees_;
  ForestConfig config_;
};

inline ForestModel fit_forest(const DataMatrix& X, const TargetVector& y,
                              const ForestConfig& config) {
  config.validate();
  if (y.values.size() != X.row_count()) {
    raise(errc::schema_mismatch, "target length does not match feature rows");
  }
  require_finite(y);
  const std::size_t n = X.row_count();
  if (n == 0) raise(errc::insufficient_data, "cannot fit a forest on no rows");

  std::vector<std::optional<RegressionTree>> slots(static_cast<std::size_t>(config.n_trees));
  parallel_for(slots.size(), [&](std::size_t t) {
    RngState rng = RngState::stream(config.seed, t);
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.next_below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    detail::TreeBuilder builder(X, y.values, config, rng);
    slots[t] = builder.build(std::move(rows));
  });

  std::vector<RegressionTree> trees;
  trees.reserve(slots.size());
  for (auto& slot : slots) trees.push_back(std::move(*slot));
  return ForestModel(std::move(trees), config);
}

inline TargetVector predict_forest(const ForestModel& model, const DataMatrix& X) {
  if (static_cast<int>(X.col_count()) != model.feature_count()) {
    raise(errc::schema_mismatch, "prediction matrix has " + std::to_string(X.col_count()) +
                                     " columns, the forest expects " +
                                     std::to_string(model.feature_count()));
  }
  TargetVector out{"prediction", std::vector<double>(X.row_count())};
  parallel_for(X.row_count(), [&](std::size_t i) {
    out.values[i] = model.predict_row(X.row(i));
  });
  return out;
}

}  // namespace coalition
