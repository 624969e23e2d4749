#include <cmath>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <coalition/data.hpp>
#include <coalition/linear.hpp>
#include <coalition/rng.hpp>

#include "helpers.hpp"

using coalition::DataMatrix;
using coalition::errc;
using coalition::LinearModel;
using coalition::TargetVector;
using Catch::Matchers::WithinAbs;

namespace {

// Random design plus exact linear response; OLS must recover it.
struct Synthetic {
  DataMatrix X;
  TargetVector y;
};

Synthetic make_synthetic(std::size_t n, std::uint64_t seed) {
  coalition::RngState rng(seed);
  std::vector<double> cells;
  std::vector<double> target;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.next_normal();
    const double b = rng.next_normal();
    const double c = rng.next_double() * 4.0 - 2.0;
    cells.insert(cells.end(), {a, b, c});
    target.push_back(3.0 + 2.0 * a - 5.0 * b + 0.25 * c);
  }
  return {DataMatrix({"a", "b", "c"}, std::move(cells)), TargetVector{"y", std::move(target)}};
}

}  // namespace

TEST_CASE("noiseless fit recovers the generating coefficients") {
  const auto data = make_synthetic(40, 2024);
  const LinearModel model = coalition::fit_ols(data.X, data.y);

  REQUIRE(model.feature_names == std::vector<std::string>{"a", "b", "c"});
  CHECK_THAT(model.intercept, WithinAbs(3.0, 1e-10));
  CHECK_THAT(model.coefficients[0], WithinAbs(2.0, 1e-10));
  CHECK_THAT(model.coefficients[1], WithinAbs(-5.0, 1e-10));
  CHECK_THAT(model.coefficients[2], WithinAbs(0.25, 1e-10));
}

TEST_CASE("fit matches a hand-solved tiny system") {
  // Two points, one feature: the line through (0, 1) and (2, 5).
  const DataMatrix X({"x"}, {0.0, 2.0, 1.0});
  const TargetVector y{"y", {1.0, 5.0, 3.0}};
  const LinearModel model = coalition::fit_ols(X, y);
  CHECK_THAT(model.intercept, WithinAbs(1.0, 1e-12));
  CHECK_THAT(model.coefficients[0], WithinAbs(2.0, 1e-12));
}

TEST_CASE("residuals are orthogonal to the design (normal equations)") {
  coalition::RngState rng(77);
  std::vector<double> cells;
  std::vector<double> target;
  const std::size_t n = 60;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.next_normal();
    const double b = rng.next_normal();
    cells.insert(cells.end(), {a, b});
    target.push_back(1.0 + a - 0.5 * b + 0.3 * rng.next_normal());  // noisy
  }
  const DataMatrix X({"a", "b"}, cells);
  const TargetVector y{"y", target};
  const LinearModel model = coalition::fit_ols(X, y);

  double r_sum = 0.0, r_dot_a = 0.0, r_dot_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y.values[i] - model.predict_row(X.row(i));
    r_sum += r;
    r_dot_a += r * X.at(i, 0);
    r_dot_b += r * X.at(i, 1);
  }
  CHECK_THAT(r_sum, WithinAbs(0.0, 1e-9));
  CHECK_THAT(r_dot_a, WithinAbs(0.0, 1e-9));
  CHECK_THAT(r_dot_b, WithinAbs(0.0, 1e-9));
}

TEST_CASE("rescaling a column rescales only its coefficient") {
  const auto data = make_synthetic(50, 31);
  const LinearModel base = coalition::fit_ols(data.X, data.y);

  std::vector<double> scaled_cells;
  for (std::size_t i = 0; i < data.X.row_count(); ++i) {
    scaled_cells.push_back(data.X.at(i, 0));
    scaled_cells.push_back(data.X.at(i, 1) * 10.0);
    scaled_cells.push_back(data.X.at(i, 2));
  }
  const DataMatrix scaled(data.X.column_names(), scaled_cells);
  const LinearModel refit = coalition::fit_ols(scaled, data.y);

  CHECK_THAT(refit.coefficients[0], WithinAbs(base.coefficients[0], 1e-9));
  CHECK_THAT(refit.coefficients[1], WithinAbs(base.coefficients[1] / 10.0, 1e-9));
  CHECK_THAT(refit.coefficients[2], WithinAbs(base.coefficients[2], 1e-9));
  CHECK_THAT(refit.intercept, WithinAbs(base.intercept, 1e-9));
}

TEST_CASE("refitting on fitted values reproduces the model") {
  const auto data = make_synthetic(30, 5);
  const LinearModel first = coalition::fit_ols(data.X, data.y);
  const TargetVector fitted = coalition::predict_linear(first, data.X);
  const LinearModel second = coalition::fit_ols(data.X, fitted);
  CHECK_THAT(second.intercept, WithinAbs(first.intercept, 1e-10));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK_THAT(second.coefficients[j], WithinAbs(first.coefficients[j], 1e-10));
  }
}

TEST_CASE("rank deficiency names the dependent column") {
  coalition::RngState rng(8);
  std::vector<double> cells;
  std::vector<double> target;
  for (std::size_t i = 0; i < 20; ++i) {
    const double a = rng.next_normal();
    cells.insert(cells.end(), {a, 2.0 * a});
    target.push_back(a + rng.next_normal());
  }
  const DataMatrix X({"a", "dup"}, cells);
  const TargetVector y{"y", target};
  try {
    coalition::fit_ols(X, y);
    FAIL("expected rank_deficient");
  } catch (const coalition::Error& e) {
    CHECK(e.code() == errc::rank_deficient);
    CHECK(std::string(e.what()).find("'dup'") != std::string::npos);
  }
}

TEST_CASE("a constant feature collides with the intercept") {
  const DataMatrix X({"a", "flat"}, {1.0, 7.0, 2.0, 7.0, 3.0, 7.0, 5.0, 7.0});
  const TargetVector y{"y", {1.0, 2.0, 3.0, 4.0}};
  try {
    coalition::fit_ols(X, y);
    FAIL("expected rank_deficient");
  } catch (const coalition::Error& e) {
    CHECK(e.code() == errc::rank_deficient);
    CHECK(std::string(e.what()).find("'flat'") != std::string::npos);
  }
}

TEST_CASE("fit validates shapes and sample size") {
  const DataMatrix X({"a", "b"}, {1, 2, 3, 4, 5, 6});
  CHECK(error_code_of([&] {
          coalition::fit_ols(X, TargetVector{"y", {1.0, 2.0}});
        }) == errc::schema_mismatch);
  CHECK(error_code_of([&] {
          coalition::fit_ols(X, TargetVector{"y", {1.0, 2.0, 3.0}});
        }) == errc::insufficient_data);  // n = p + 1
  CHECK(error_code_of([&] {
          coalition::fit_ols(X, TargetVector{"y", {1.0, 2.0, std::nan("")}});
        }) == errc::validation);
}

TEST_CASE("prediction requires the training schema") {
  const auto data = make_synthetic(20, 12);
  const LinearModel model = coalition::fit_ols(data.X, data.y);
  const DataMatrix renamed({"a", "b", "z"}, std::vector<double>(data.X.storage().begin(),
                                                                data.X.storage().end()));
  CHECK(error_code_of([&] { coalition::predict_linear(model, renamed); }) ==
        errc::schema_mismatch);
}

TEST_CASE("predict_row is the affine form") {
  LinearModel model;
  model.intercept = 1.5;
  model.coefficients = {2.0, -1.0};
  model.feature_names = {"a", "b"};
  const std::vector<double> row{3.0, 4.0};
  CHECK(model.predict_row(row) == 1.5 + 6.0 - 4.0);
}
