#pragma once

// Model-agnostic Shapley attribution. Per instance, a coalition of features
// induces a cooperative game: the worth of a feature subset is the model's
// mean prediction over a background sample with the subset's features pinned
// to the instance (the interventional value function). Exact mode solves the
// induced game with the subset formula from game.hpp; sampled mode averages
// marginal contributions over random join orders.
//
// Summation over background rows, trees, and instances always runs in index
// order, so results are byte-stable across runs and thread counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coalition/data.hpp"
#include "coalition/error.hpp"
#include "coalition/forest.hpp"
#include "coalition/game.hpp"
#include "coalition/linear.hpp"
#include "coalition/parallel.hpp"
#include "coalition/rng.hpp"

namespace coalition {

using PredictFn = std::function<double(std::span<const double>)>;

// The referenced model must outlive the returned function.
inline PredictFn make_predictor(const LinearModel& model) {
  return [m = &model](std::span<const double> row) { return m->predict_row(row); };
}

inline PredictFn make_predictor(const ForestModel& model) {
  return [m = &model](std::span<const double> row) { return m->predict_row(row); };
}

// Reference rows the value function's expectation runs over.
struct BackgroundSet {
  DataMatrix rows;
};

inline constexpr std::size_t kDefaultBackgroundCap = 100;
inline constexpr int kExactFeatureLimit = 15;

// Stream salts keep the background shuffle and the permutation sampler off
// the stream that generated the data itself.
inline constexpr std::uint64_t kBackgroundStreamSalt = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kSamplingStreamSalt = 0xbf58476d1ce4e5b9ULL;

// Full training sample when it fits under the cap, otherwise a seeded
// index-shuffle subsample (selected indices kept in ascending order).
inline BackgroundSet make_background(const DataMatrix& X, std::size_t cap = kDefaultBackgroundCap,
                                     std::uint64_t seed = 0) {
  if (cap < 1) raise(errc::validation, "background cap must be at least 1");
  if (X.row_count() <= cap) {
    return BackgroundSet{X};
  }
  std::vector<std::size_t> indices(X.row_count());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  RngState rng(seed ^ kBackgroundStreamSalt);
  shuffle(indices, rng);
  indices.resize(cap);
  std::sort(indices.begin(), indices.end());

  std::vector<double> values;
  values.reserve(cap * X.col_count());
  for (std::size_t i : indices) {
    const auto row = X.row(i);
    values.insert(values.end(), row.begin(), row.end());
  }
  return BackgroundSet{DataMatrix(X.column_names(), std::move(values))};
}

struct SampledAttribution {
  std::vector<double> values;
  std::vector<double> std_errors;  // standard error of each per-feature mean
  int n_permutations = 0;
};

// Per-instance, per-feature attributions against a common base value.
struct AttributionResult {
  double base_value = 0.0;
  std::vector<std::string> feature_names;
  std::size_t instance_count = 0;
  std::vector<double> values;  // row-major, instance_count x feature count

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * feature_names.size(), feature_names.size()};
  }
};

// Holds the model handle and background, and caches the empty-coalition
// worth (the base value) that every instance shares.
class AttributionEngine {
 public:
  AttributionEngine(PredictFn predict, BackgroundSet background)
      : predict_(std::move(predict)), background_(std::move(background)) {
    const std::size_t m = background_.rows.row_count();
    double acc = 0.0;
    for (std::size_t b = 0; b < m; ++b) acc += predict_(background_.rows.row(b));
    base_value_ = acc / static_cast<double>(m);
  }

  std::size_t feature_count() const { return background_.rows.col_count(); }
  double base_value() const { return base_value_; }
  const BackgroundSet& background() const { return background_; }

  // Interventional worth of one feature subset. The empty subset is the
  // cached background mean and the full subset is exactly f(instance).
  double subset_worth(std::span<const double> instance, CoalitionMask subset) const {
    check_instance(instance);
    const std::size_t p = feature_count();
    const CoalitionMask full = (CoalitionMask{1} << p) - 1;
    if ((subset & ~full) != 0) {
      raise(errc::invalid_argument, "subset mask references features beyond the schema");
    }
    if (subset == 0) return base_value_;
    if (subset == full) return predict_(instance);

    const std::size_t m = background_.rows.row_count();
    std::vector<double> mixed(p);
    double acc = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const auto bg_row = background_.rows.row(b);
      for (std::size_t j = 0; j < p; ++j) {
        mixed[j] = (subset >> j & 1) ? instance[j] : bg_row[j];
      }
      acc += predict_(mixed);
    }
    return acc / static_cast<double>(m);
  }

  // Dense worth table over all 2^p subsets; each mask is evaluated once.
  std::vector<double> worth_table(std::span<const double> instance) const {
    const std::size_t p = feature_count();
    std::vector<double> worth(std::size_t{1} << p);
    for (CoalitionMask mask = 0; mask < worth.size(); ++mask) {
      worth[mask] = subset_worth(instance, mask);
    }
    return worth;
  }

  std::vector<double> shap_exact(std::span<const double> instance) const {
    const std::size_t p = feature_count();
    if (p > static_cast<std::size_t>(kExactFeatureLimit)) {
      raise(errc::size_limit,
            "exact attribution enumerates 2^p subsets and is limited to " +
                std::to_string(kExactFeatureLimit) + " features (got " +
                std::to_string(p) + "); use shap_sampled instead");
    }
    const CoalitionGame induced(background_.rows.column_names(), worth_table(instance));
    return shapley_by_subsets(induced).values;
  }

  SampledAttribution shap_sampled(std::span<const double> instance, int n_permutations,
                                  RngState& rng) const {
    check_instance(instance);
    const std::size_t p = feature_count();
    if (p > 63) {
      raise(errc::size_limit, "sampled attribution supports at most 63 features");
    }
    if (n_permutations < 1) {
      raise(errc::invalid_argument, "need at least one permutation");
    }

    // Worth lookups repeat heavily across permutations; memoize per mask.
    std::vector<double> dense_cache;
    std::vector<char> dense_known;
    std::unordered_map<CoalitionMask, double> sparse_cache;
    const bool use_dense = p <= 20;
    if (use_dense) {
      dense_cache.assign(std::size_t{1} << p, 0.0);
      dense_known.assign(std::size_t{1} << p, 0);
    }
    const auto worth_of = [&](CoalitionMask mask) {
      if (use_dense) {
        if (!dense_known[mask]) {
          dense_cache[mask] = subset_worth(instance, mask);
          dense_known[mask] = 1;
        }
        return dense_cache[mask];
      }
      const auto it = sparse_cache.find(mask);
      if (it != sparse_cache.end()) return it->second;
      const double w = subset_worth(instance, mask);
      sparse_cache.emplace(mask, w);
      return w;
    };

    std::vector<int> order(p);
    std::vector<double> sums(p, 0.0), sum_squares(p, 0.0);
    for (int rep = 0; rep < n_permutations; ++rep) {
      std::iota(order.begin(), order.end(), 0);
      shuffle(order, rng);
      CoalitionMask joined = 0;
      double before = worth_of(0);
      for (int feature : order) {
        joined |= CoalitionMask{1} << feature;
        const double after = worth_of(joined);
        const double contribution = after - before;
        sums[static_cast<std::size_t>(feature)] += contribution;
        sum_squares[static_cast<std::size_t>(feature)] += contribution * contribution;
        before = after;
      }
    }

    SampledAttribution out;
    out.n_permutations = n_permutations;
    out.values.resize(p);
    out.std_errors.assign(p, 0.0);
    const auto reps = static_cast<double>(n_permutations);
    for (std::size_t j = 0; j < p; ++j) {
      out.values[j] = sums[j] / reps;
      if (n_permutations > 1) {
        const double spread = std::max(0.0, sum_squares[j] - sums[j] * sums[j] / reps);
        out.std_errors[j] = std::sqrt(spread / (reps - 1.0) / reps);
      }
    }
    return out;
  }

 private:
  void check_instance(std::span<const double> instance) const {
    if (instance.size() != feature_count()) {
      raise(errc::schema_mismatch, "instance has " + std::to_string(instance.size()) +
                                       " features, the background has " +
                                       std::to_string(feature_count()));
    }
  }

  PredictFn predict_;
  BackgroundSet background_;
  double base_value_ = 0.0;
};

inline double coalition_value(const PredictFn& predict, std::span<const double> instance,
                              CoalitionMask subset, const BackgroundSet& background) {
  return AttributionEngine(predict, background).subset_worth(instance, subset);
}

inline std::vector<double> shap_exact(const PredictFn& predict, std::span<const double> instance,
                                      const BackgroundSet& background) {
  return AttributionEngine(predict, background).shap_exact(instance);
}

inline SampledAttribution shap_sampled(const PredictFn& predict, std::span<const double> instance,
                                       const BackgroundSet& background, int n_permutations,
                                       RngState& rng) {
  return AttributionEngine(predict, background).shap_sampled(instance, n_permutations, rng);
}

struct AttributionOptions {
  enum class Mode { exact, sampled };
  Mode mode = Mode::exact;
  int n_permutations = 2000;
  std::uint64_t seed = 0;  // sampled mode: instance i uses stream (seed ^ salt) ^ i
};

// Attributes every row of X. Instances are independent, so they run in
// parallel and land in pre-assigned result rows.
inline AttributionResult attribute_all(const PredictFn& predict, const DataMatrix& X,
                                       const BackgroundSet& background,
                                       const AttributionOptions& options = {}) {
  if (X.column_names() != background.rows.column_names()) {
    raise(errc::schema_mismatch, "instance columns do not match the background columns");
  }
  const std::size_t p = X.col_count();

  AttributionEngine engine(predict, background);
  AttributionResult result;
  result.base_value = engine.base_value();
  result.feature_names = X.column_names();
  result.instance_count = X.row_count();
  result.values.assign(X.row_count() * p, 0.0);

  parallel_for(X.row_count(), [&](std::size_t i) {
    std::vector<double> row_values;
    if (options.mode == AttributionOptions::Mode::exact) {
      row_values = engine.shap_exact(X.row(i));
    } else {
      RngState rng = RngState::stream(options.seed ^ kSamplingStreamSalt, i);
      row_values = engine.shap_sampled(X.row(i), options.n_permutations, rng).values;
    }
    std::copy(row_values.begin(), row_values.end(), result.values.begin() + static_cast<std::ptrdiff_t>(i * p));
  });
  return result;
}

// Global importance: per feature, the mean of |attribution| over instances.
inline std::vector<double> mean_abs_attribution(const AttributionResult& result) {
  if (result.instance_count == 0) {
    raise(errc::insufficient_data, "attribution result has no instances");
  }
  const std::size_t p = result.feature_names.size();
  std::vector<double> out(p, 0.0);
  for (std::size_t i = 0; i < result.instance_count; ++i) {
    const auto row = result.row(i);
    for (std::size_t j = 0; j < p; ++j) out[j] += std::abs(row[j]);
  }
  for (double& v : out) v /= static_cast<double>(result.instance_count);
  return out;
}

}  // namespace coalition
