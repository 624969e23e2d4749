#pragma once

// Experiment runner and report emitters. run_experiment generates a seeded
// dataset, fits OLS and a forest, attributes every training instance against
// the forest, and pairs |OLS coefficient| tables with mean-|SHAP| tables.
//
// Reports embed the fully resolved configuration, so any table can be
// regenerated from its own metadata. JSON output is canonical: fixed key
// order, round-trip double formatting, and no wall-clock fields, so equal
// configs produce byte-identical files.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coalition/attribution.hpp"
#include "coalition/data.hpp"
#include "coalition/error.hpp"
#include "coalition/forest.hpp"
#include "coalition/linear.hpp"
#include "coalition/simulation.hpp"

namespace coalition {

struct AttributionConfig {
  AttributionOptions::Mode mode = AttributionOptions::Mode::exact;
  int n_permutations = 2000;           // sampled mode only
  std::size_t background_cap = kDefaultBackgroundCap;

  void validate() const {
    if (n_permutations < 1) raise(errc::validation, "n_permutations must be at least 1");
    if (background_cap < 1) raise(errc::validation, "background_cap must be at least 1");
  }
};

enum class ReportFormat { json, csv, markdown };

inline std::string to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return "json";
    case ReportFormat::csv: return "csv";
    case ReportFormat::markdown: return "markdown";
  }
  raise(errc::invalid_argument, "unknown report format enumerator");
}

inline ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  if (text == "markdown") return ReportFormat::markdown;
  raise(errc::invalid_argument,
        "unknown format '" + text + "' (expected json, csv, or markdown)");
}

inline std::string to_string(AttributionOptions::Mode mode) {
  return mode == AttributionOptions::Mode::exact ? "exact" : "sampled";
}

inline AttributionOptions::Mode parse_attribution_mode(const std::string& text) {
  if (text == "exact") return AttributionOptions::Mode::exact;
  if (text == "sampled") return AttributionOptions::Mode::sampled;
  raise(errc::invalid_argument, "unknown mode '" + text + "' (expected exact or sampled)");
}

struct OutputConfig {
  ReportFormat format = ReportFormat::json;
  std::string path;  // empty = stdout table only
};

struct RunConfig {
  ExperimentSpec experiment;
  ForestConfig forest;
  AttributionConfig attribution;
  OutputConfig output;

  void validate() const {
    experiment.validate();
    forest.validate();
    attribution.validate();
  }
};

// Paired tables plus the resolved configuration that produced them.
struct ComparisonReport {
  RunConfig config;
  std::vector<std::string> feature_names;
  double ols_intercept = 0.0;
  std::vector<double> ols_coefficients;
  std::vector<double> mean_abs_shap;
  double base_value = 0.0;  // background-mean forest prediction

  void validate() const {
    if (feature_names.empty()) raise(errc::validation, "report has no features");
    if (ols_coefficients.size() != feature_names.size() ||
        mean_abs_shap.size() != feature_names.size()) {
      raise(errc::validation, "report tables must align with feature names");
    }
  }
};

inline ComparisonReport run_experiment(const RunConfig& config) {
  config.validate();
  try {
    const Dataset data = generate(config.experiment);
    const LinearModel ols = fit_ols(data.features, data.target);
    const ForestModel forest = fit_forest(data.features, data.target, config.forest);

    const BackgroundSet background =
        make_background(data.features, config.attribution.background_cap, config.experiment.seed);
    AttributionOptions options;
    options.mode = config.attribution.mode;
    options.n_permutations = config.attribution.n_permutations;
    options.seed = config.experiment.seed;
    const AttributionResult attributions =
        attribute_all(make_predictor(forest), data.features, background, options);

    ComparisonReport report;
    report.config = config;
    report.feature_names = data.features.column_names();
    report.ols_intercept = ols.intercept;
    report.ols_coefficients = ols.coefficients;
    report.mean_abs_shap = mean_abs_attribution(attributions);
    report.base_value = attributions.base_value;
    report.validate();
    return report;
  } catch (const Error& e) {
    raise(e.code(), "experiment '" + to_string(config.experiment.name) + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json named_vector(const std::vector<std::string>& names,
                                           const std::vector<double>& values) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = values[i];
  return out;
}

// Fixed significant digits for human-facing tables.
inline std::string format_sig(double value, int digits = 6) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return buffer;
}

}  // namespace detail

inline constexpr const char* kReportSchema = "coalition/comparison-report/v1";

inline std::string report_to_json(const ComparisonReport& report) {
  report.validate();
  nlohmann::ordered_json doc;
  doc["schema"] = kReportSchema;
  doc["experiment"] = {{"name", to_string(report.config.experiment.name)},
                       {"n", report.config.experiment.n},
                       {"noise_sd", report.config.experiment.noise_sd},
                       {"seed", report.config.experiment.seed}};
  nlohmann::ordered_json forest;
  forest["n_trees"] = report.config.forest.n_trees;
  if (report.config.forest.max_depth) {
    forest["max_depth"] = *report.config.forest.max_depth;
  } else {
    forest["max_depth"] = nullptr;
  }
  forest["min_samples_split"] = report.config.forest.min_samples_split;
  forest["min_samples_leaf"] = report.config.forest.min_samples_leaf;
  forest["features_per_split"] = report.config.forest.features_per_split;
  forest["bootstrap"] = report.config.forest.bootstrap;
  forest["seed"] = report.config.forest.seed;
  doc["forest"] = std::move(forest);
  doc["attribution"] = {{"mode", to_string(report.config.attribution.mode)},
                        {"n_permutations", report.config.attribution.n_permutations},
                        {"background_cap", report.config.attribution.background_cap}};
  doc["base_value"] = report.base_value;
  doc["ols"] = {{"intercept", report.ols_intercept},
                {"coefficients", detail::named_vector(report.feature_names,
                                                      report.ols_coefficients)}};
  doc["mean_abs_shap"] = detail::named_vector(report.feature_names, report.mean_abs_shap);
  return doc.dump(2) + "\n";
}

inline ComparisonReport report_from_json(const std::string& text,
                                         const std::string& origin = "<string>") {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(errc::parse, origin + ": " + e.what());
  }
  try {
    if (doc.at("schema").get<std::string>() != kReportSchema) {
      raise(errc::schema_mismatch, origin + ": unexpected schema tag");
    }
    ComparisonReport report;
    const auto& experiment = doc.at("experiment");
    report.config.experiment.name = parse_experiment(experiment.at("name").get<std::string>());
    report.config.experiment.n = experiment.at("n").get<std::size_t>();
    report.config.experiment.noise_sd = experiment.at("noise_sd").get<double>();
    report.config.experiment.seed = experiment.at("seed").get<std::uint64_t>();

    const auto& forest = doc.at("forest");
    report.config.forest.n_trees = forest.at("n_trees").get<int>();
    if (forest.at("max_depth").is_null()) {
      report.config.forest.max_depth.reset();
    } else {
      report.config.forest.max_depth = forest.at("max_depth").get<int>();
    }
    report.config.forest.min_samples_split = forest.at("min_samples_split").get<int>();
    report.config.forest.min_samples_leaf = forest.at("min_samples_leaf").get<int>();
    report.config.forest.features_per_split = forest.at("features_per_split").get<double>();
    report.config.forest.bootstrap = forest.at("bootstrap").get<bool>();
    report.config.forest.seed = forest.at("seed").get<std::uint64_t>();

    const auto& attribution = doc.at("attribution");
    report.config.attribution.mode =
        parse_attribution_mode(attribution.at("mode").get<std::string>());
    report.config.attribution.n_permutations = attribution.at("n_permutations").get<int>();
    report.config.attribution.background_cap =
        attribution.at("background_cap").get<std::size_t>();

    report.base_value = doc.at("base_value").get<double>();
    report.ols_intercept = doc.at("ols").at("intercept").get<double>();
    for (const auto& item : doc.at("ols").at("coefficients").items()) {
      report.feature_names.push_back(item.key());
      report.ols_coefficients.push_back(item.value().get<double>());
    }
    const auto& shap = doc.at("mean_abs_shap");
    for (std::size_t i = 0; i < report.feature_names.size(); ++i) {
      report.mean_abs_shap.push_back(shap.at(report.feature_names[i]).get<double>());
    }
    if (shap.size() != report.feature_names.size()) {
      raise(errc::schema_mismatch, origin + ": mean_abs_shap keys do not match coefficients");
    }
    report.validate();
    return report;
  } catch (const nlohmann::json::exception& e) {
    raise(errc::schema_mismatch, origin + ": " + e.what());
  }
}

inline std::string report_to_csv(const ComparisonReport& report) {
  report.validate();
  std::string out = "feature,ols_coef,mean_abs_shap\n";
  for (std::size_t i = 0; i < report.feature_names.size(); ++i) {
    out += report.feature_names[i];
    out += ',';
    out += detail::format_double(report.ols_coefficients[i]);
    out += ',';
    out += detail::format_double(report.mean_abs_shap[i]);
    out += '\n';
  }
  return out;
}

inline std::string report_to_markdown(const ComparisonReport& report) {
  report.validate();
  std::string out = "# Comparison report: " + to_string(report.config.experiment.name) + "\n\n";
  out += "Seed " + std::to_string(report.config.experiment.seed) + ", n = " +
         std::to_string(report.config.experiment.n) + ", " +
         std::to_string(report.config.forest.n_trees) + " trees, " +
         to_string(report.config.attribution.mode) + " attribution.\n\n";
  out += "| feature | ols_coef | mean_abs_shap |\n";
  out += "| --- | ---: | ---: |\n";
  for (std::size_t i = 0; i < report.feature_names.size(); ++i) {
    out += "| " + report.feature_names[i] + " | " +
           detail::format_sig(report.ols_coefficients[i]) + " | " +
           detail::format_sig(report.mean_abs_shap[i]) + " |\n";
  }
  return out;
}

inline std::string render_report(const ComparisonReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return report_to_json(report);
    case ReportFormat::csv: return report_to_csv(report);
    case ReportFormat::markdown: return report_to_markdown(report);
  }
  raise(errc::invalid_argument, "unknown report format enumerator");
}

inline void emit_report(const ComparisonReport& report, ReportFormat format,
                        const std::string& path) {
  const std::string body = render_report(report, format);
  if (path.empty()) raise(errc::validation, "output path must be non-empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::io, "cannot open output file '" + path + "'");
  out << body;
  out.flush();
  if (!out) raise(errc::io, "failed writing output file '" + path + "'");
}

// Paired stdout blocks (coefficients, then SHAP), 6 significant digits.
inline std::string format_report_table(const ComparisonReport& report) {
  report.validate();
  std::size_t width = 0;
  for (const auto& name : report.feature_names) width = std::max(width, name.size());

  const auto block = [&](const std::string& title, const std::vector<double>& values) {
    std::string out = title + ":\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      out += "  " + report.feature_names[i] +
             std::string(width - report.feature_names[i].size() + 2, ' ') +
             detail::format_sig(values[i]) + "\n";
    }
    return out;
  };

  std::string out = "Experiment: " + to_string(report.config.experiment.name) + " (seed " +
                    std::to_string(report.config.experiment.seed) + ", n " +
                    std::to_string(report.config.experiment.n) + ")\n\n";
  out += block("Linear Regression Coefficients", report.ols_coefficients);
  out += "\n";
  out += block("Mean Absolute SHAP Values", report.mean_abs_shap);
  return out;
}

}  // namespace coalition
