#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <coalition/data.hpp>
#include <coalition/forest.hpp>
#include <coalition/rng.hpp>

#include "helpers.hpp"

using coalition::DataMatrix;
using coalition::errc;
using coalition::ForestConfig;
using coalition::ForestModel;
using coalition::TargetVector;
using Catch::Matchers::WithinAbs;

namespace {

ForestConfig single_tree() {
  ForestConfig config;
  config.n_trees = 1;
  config.bootstrap = false;
  return config;
}

struct Wave {
  DataMatrix X;
  TargetVector y;
};

// Smooth nonlinear response on two features plus mild noise.
Wave make_wave(std::size_t n, std::uint64_t seed, double noise_sd) {
  coalition::RngState rng(seed);
  std::vector<double> cells, target;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.next_double() * 4.0 - 2.0;
    const double b = rng.next_double() * 4.0 - 2.0;
    cells.insert(cells.end(), {a, b});
    target.push_back(a + 0.5 * b * b + noise_sd * rng.next_normal());
  }
  return {DataMatrix({"a", "b"}, std::move(cells)), TargetVector{"y", std::move(target)}};
}

}  // namespace

TEST_CASE("constant target collapses to a single-leaf tree") {
  const DataMatrix X({"x"}, {1.0, 2.0, 3.0, 4.0});
  const TargetVector y{"y", {7.5, 7.5, 7.5, 7.5}};
  const ForestModel model = coalition::fit_forest(X, y, single_tree());

  REQUIRE(model.trees().size() == 1);
  CHECK(model.trees()[0].nodes().size() == 1);
  const std::vector<double> probe{-100.0};
  CHECK(model.predict_row(probe) == 7.5);
}

TEST_CASE("a step function splits at the straddling midpoint") {
  const DataMatrix X({"x"}, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
  const TargetVector y{"y", {0.0, 0.0, 0.0, 1.0, 1.0, 1.0}};
  const ForestModel model = coalition::fit_forest(X, y, single_tree());

  const auto& root = model.trees()[0].nodes()[0];
  REQUIRE(!root.is_leaf());
  CHECK(root.feature_index == 0);
  CHECK_THAT(root.threshold, WithinAbs(0.5, 1e-12));

  CHECK(model.predict_row(std::vector<double>{0.49}) == 0.0);
  CHECK(model.predict_row(std::vector<double>{0.51}) == 1.0);
}

TEST_CASE("a deep unbagged tree memorizes distinct rows") {
  const auto data = make_wave(64, 42, 0.0);
  const ForestModel model = coalition::fit_forest(data.X, data.y, single_tree());
  for (std::size_t i = 0; i < data.X.row_count(); ++i) {
    CHECK_THAT(model.predict_row(data.X.row(i)), WithinAbs(data.y.values[i], 1e-12));
  }
}

TEST_CASE("depth zero predicts the training mean") {
  auto config = single_tree();
  config.max_depth = 0;
  const DataMatrix X({"x"}, {1.0, 2.0, 3.0, 4.0});
  const TargetVector y{"y", {1.0, 2.0, 3.0, 6.0}};
  const ForestModel model = coalition::fit_forest(X, y, config);
  CHECK_THAT(model.predict_row(std::vector<double>{2.5}), WithinAbs(3.0, 1e-12));
}

TEST_CASE("forest prediction is the mean over trees") {
  const auto data = make_wave(50, 9, 0.1);
  ForestConfig config;
  config.n_trees = 5;
  config.seed = 3;
  const ForestModel model = coalition::fit_forest(data.X, data.y, config);

  const std::vector<double> probe{0.3, -0.7};
  double acc = 0.0;
  for (const auto& tree : model.trees()) acc += tree.predict_row(probe);
  CHECK(model.predict_row(probe) == acc / 5.0);
}

TEST_CASE("same config and data reproduce identical forests") {
  const auto data = make_wave(80, 4, 0.1);
  ForestConfig config;
  config.n_trees = 10;
  config.seed = 21;
  const ForestModel a = coalition::fit_forest(data.X, data.y, config);
  const ForestModel b = coalition::fit_forest(data.X, data.y, config);

  const auto probes = make_wave(30, 77, 0.0);
  for (std::size_t i = 0; i < probes.X.row_count(); ++i) {
    CHECK(a.predict_row(probes.X.row(i)) == b.predict_row(probes.X.row(i)));
  }

  config.seed = 22;
  const ForestModel c = coalition::fit_forest(data.X, data.y, config);
  bool any_diff = false;
  for (std::size_t i = 0; i < probes.X.row_count(); ++i) {
    any_diff = any_diff || a.predict_row(probes.X.row(i)) != c.predict_row(probes.X.row(i));
  }
  CHECK(any_diff);
}

TEST_CASE("root split is the global SSE minimizer") {
  const auto data = make_wave(40, 15, 0.2);
  auto config = single_tree();
  config.max_depth = 1;
  const ForestModel model = coalition::fit_forest(data.X, data.y, config);
  const auto& root = model.trees()[0].nodes()[0];
  REQUIRE(!root.is_leaf());

  // Brute-force re-scan: every midpoint of every feature.
  const std::size_t n = data.X.row_count();
  double best_sse = std::numeric_limits<double>::infinity();
  double achieved_sse = std::numeric_limits<double>::infinity();
  for (std::size_t feature = 0; feature < 2; ++feature) {
    std::vector<double> xs = data.X.column(feature);
    std::vector<double> sorted(xs);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < n; ++i) {
      if (sorted[i] == sorted[i - 1]) continue;
      const double threshold = 0.5 * (sorted[i - 1] + sorted[i]);
      double sum_l = 0, sum_r = 0, count_l = 0, count_r = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (xs[r] <= threshold) { sum_l += data.y.values[r]; ++count_l; }
        else { sum_r += data.y.values[r]; ++count_r; }
      }
      double sse = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double mean = xs[r] <= threshold ? sum_l / count_l : sum_r / count_r;
        sse += (data.y.values[r] - mean) * (data.y.values[r] - mean);
      }
      best_sse = std::min(best_sse, sse);
      if (feature == static_cast<std::size_t>(root.feature_index) &&
          std::abs(threshold - root.threshold) < 1e-12) {
        achieved_sse = sse;
      }
    }
  }
  CHECK_THAT(achieved_sse, WithinAbs(best_sse, 1e-9));
}

TEST_CASE("ties break toward the lowest feature index") {
  // Feature 1 duplicates feature 0, so every split is tied across them.
  const DataMatrix X({"a", "a_copy"}, {0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0});
  const TargetVector y{"y", {0.0, 0.0, 5.0, 5.0}};
  const ForestModel model = coalition::fit_forest(X, y, single_tree());
  const auto& root = model.trees()[0].nodes()[0];
  REQUIRE(!root.is_leaf());
  CHECK(root.feature_index == 0);
}

TEST_CASE("predictions stay within the training range") {
  const auto data = make_wave(100, 33, 0.3);
  ForestConfig config;
  config.n_trees = 15;
  config.seed = 1;
  const ForestModel model = coalition::fit_forest(data.X, data.y, config);

  const double lo = *std::min_element(data.y.values.begin(), data.y.values.end());
  const double hi = *std::max_element(data.y.values.begin(), data.y.values.end());
  const auto probes = make_wave(50, 99, 0.0);
  for (std::size_t i = 0; i < probes.X.row_count(); ++i) {
    const double prediction = model.predict_row(probes.X.row(i));
    CHECK(prediction >= lo);
    CHECK(prediction <= hi);
  }
}

TEST_CASE("forest generalizes on held-out data") {
  const auto train = make_wave(400, 7, 0.05);
  const auto test = make_wave(120, 8, 0.0);
  ForestConfig config;
  config.n_trees = 50;
  config.seed = 5;
  const ForestModel model = coalition::fit_forest(train.X, train.y, config);

  double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
  for (double v : test.y.values) mean += v;
  mean /= static_cast<double>(test.y.values.size());
  for (std::size_t i = 0; i < test.X.row_count(); ++i) {
    const double err = test.y.values[i] - model.predict_row(test.X.row(i));
    ss_res += err * err;
    ss_tot += (test.y.values[i] - mean) * (test.y.values[i] - mean);
  }
  CHECK(1.0 - ss_res / ss_tot > 0.8);
}

TEST_CASE("min_samples_leaf constrains leaf sizes") {
  auto config = single_tree();
  config.min_samples_leaf = 3;
  const auto data = make_wave(30, 2, 0.1);
  const ForestModel model = coalition::fit_forest(data.X, data.y, config);

  // Walk every training row to its leaf and count arrivals.
  const auto& nodes = model.trees()[0].nodes();
  std::vector<int> hits(nodes.size(), 0);
  for (std::size_t i = 0; i < data.X.row_count(); ++i) {
    const auto row = data.X.row(i);
    int at = 0;
    while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
      const auto& node = nodes[static_cast<std::size_t>(at)];
      at = row[static_cast<std::size_t>(node.feature_index)] <= node.threshold ? node.left
                                                                               : node.right;
    }
    ++hits[static_cast<std::size_t>(at)];
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) CHECK(hits[i] >= 3);
  }
}

TEST_CASE("config validation rejects bad values") {
  const DataMatrix X({"x"}, {1.0, 2.0});
  const TargetVector y{"y", {1.0, 2.0}};
  ForestConfig config;

  config.n_trees = 0;
  CHECK(error_code_of([&] { coalition::fit_forest(X, y, config); }) == errc::validation);
  config = ForestConfig{};
  config.min_samples_split = 1;
  CHECK(error_code_of([&] { coalition::fit_forest(X, y, config); }) == errc::validation);
  config = ForestConfig{};
  config.min_samples_leaf = 0;
  CHECK(error_code_of([&] { coalition::fit_forest(X, y, config); }) == errc::validation);
  config = ForestConfig{};
  config.features_per_split = 0.0;
  CHECK(error_code_of([&] { coalition::fit_forest(X, y, config); }) == errc::validation);
  config = ForestConfig{};
  config.features_per_split = 1.5;
  CHECK(error_code_of([&] { coalition::fit_forest(X, y, config); }) == errc::validation);
  config = ForestConfig{};
  config.max_depth = -1;
  CHECK(error_code_of([&] { coalition::fit_forest(X, y, config); }) == errc::validation);
}

TEST_CASE("prediction rejects mismatched schemas") {
  const auto data = make_wave(20, 1, 0.1);
  const ForestModel model = coalition::fit_forest(data.X, data.y, single_tree());
  const DataMatrix wrong({"only"}, {1.0, 2.0});
  CHECK(error_code_of([&] { coalition::predict_forest(model, wrong); }) ==
        errc::schema_mismatch);
}

TEST_CASE("target length must match the design") {
  const DataMatrix X({"x"}, {1.0, 2.0, 3.0});
  CHECK(error_code_of([&] {
          coalition::fit_forest(X, TargetVector{"y", {1.0}}, ForestConfig{});
        }) == errc::schema_mismatch);
}
