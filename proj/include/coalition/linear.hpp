#pragma once

// Ordinary least squares on a dense design matrix. The fit goes through a
// Householder QR factorization of [1 | X] rather than the normal equations,
// which keeps the solve stable at the condition numbers simulated factor
// data can produce. An intercept column is always included.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coalition/data.hpp"
#include "coalition/error.hpp"

namespace coalition {

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;    // aligned to feature_names
  std::vector<std::string> feature_names;

  double predict_row(std::span<const double> row) const {
    double acc = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j) acc += coefficients[j] * row[j];
    return acc;
  }
};

namespace detail {

// Columns with |R_jj| below this fraction of the largest diagonal are
// treated as linearly dependent on their predecessors.
inline constexpr double kRankTolerance = 1e-10;

struct QrLeastSquares {
  std::vector<double> solution;  // length k
};

// In-place Householder QR on column-major `cols`, applying the same
// reflections to `rhs`, then back-substitution. `names` labels columns in
// the rank-deficiency error.
inline QrLeastSquares solve_least_squares(std::vector<std::vector<double>> cols,
                                          std::vector<double> rhs,
                                          const std::vector<std::string>& names) {
  const std::size_t k = cols.size();
  const std::size_t m = rhs.size();

  for (std::size_t j = 0; j < k; ++j) {
    auto& pivot = cols[j];
    double norm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) norm2 += pivot[i] * pivot[i];
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;  // zero column; caught by the rank check below

    const double alpha = (pivot[j] > 0.0) ? -norm : norm;
    pivot[j] -= alpha;  // pivot[j:m] now holds the Householder vector v
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) vnorm2 += pivot[i] * pivot[i];

    if (vnorm2 > 0.0) {
      const auto reflect = [&](std::vector<double>& col) {
        double dot = 0.0;
        for (std::size_t i = j; i < m; ++i) dot += pivot[i] * col[i];
        const double scale = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < m; ++i) col[i] -= scale * pivot[i];
      };
      for (std::size_t c = j + 1; c < k; ++c) reflect(cols[c]);
      reflect(rhs);
    }
    pivot[j] = alpha;  // R diagonal; entries below are no longer needed
  }

  double max_diag = 0.0;
  for (std::size_t j = 0; j < k; ++j) max_diag = std::max(max_diag, std::abs(cols[j][j]));
  for (std::size_t j = 0; j < k; ++j) {
    if (std::abs(cols[j][j]) < kRankTolerance * max_diag || cols[j][j] == 0.0) {
      raise(errc::rank_deficient, "design column '" + names[j] +
                                      "' is linearly dependent on the columns before it");
    }
  }

  QrLeastSquares out;
  out.solution.assign(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double acc = rhs[jj];
    for (std::size_t c = jj + 1; c < k; ++c) acc -= cols[c][jj] * out.solution[c];
    out.solution[jj] = acc / cols[jj][jj];
  }
  return out;
}

}  // namespace detail

inline LinearModel fit_ols(const DataMatrix& X, const TargetVector& y) {
  const std::size_t n = X.row_count();
  const std::size_t p = X.col_count();
  if (y.values.size() != n) {
    raise(errc::schema_mismatch, "target has " + std::to_string(y.values.size()) +
                                     " rows, features have " + std::to_string(n));
  }
  require_finite(y);
  if (n <= p + 1) {
    raise(errc::insufficient_data, "need more than " + std::to_string(p + 1) +
                                       " rows to fit " + std::to_string(p) +
                                       " coefficients plus an intercept; got " +
                                       std::to_string(n));
  }

  std::vector<std::vector<double>> cols(p + 1, std::vector<double>(n));
  cols[0].assign(n, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) cols[j + 1][i] = X.at(i, j);
  }
  std::vector<std::string> names;
  names.reserve(p + 1);
  names.emplace_back("intercept");
  for (const auto& name : X.column_names()) names.push_back(name);

  const auto solved = detail::solve_least_squares(std::move(cols), y.values, names);

  LinearModel model;
  model.intercept = solved.solution[0];
  model.coefficients.assign(solved.solution.begin() + 1, solved.solution.end());
  model.feature_names = X.column_names();
  return model;
}

inline TargetVector predict_linear(const LinearModel& model, const DataMatrix& X) {
  if (X.column_names() != model.feature_names) {
    raise(errc::schema_mismatch,
          "prediction columns do not match the model's feature columns");
  }
  TargetVector out{"prediction", std::vector<double>(X.row_count())};
  for (std::size_t i = 0; i < X.row_count(); ++i) {
    out.values[i] = model.predict_row(X.row(i));
  }
  return out;
}

}  // namespace coalition
