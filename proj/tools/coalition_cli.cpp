// Command-line front door: solve characteristic-function games, run the
// benchmark experiments, and explain ad-hoc CSV datasets.
//
// Exit codes: 0 success, 2 validation/config error, 3 numeric failure
// (rank deficiency), 4 I/O failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <coalition/coalition.hpp>

namespace {

int exit_code_for(coalition::errc code) {
  switch (code) {
    case coalition::errc::io: return 4;
    case coalition::errc::rank_deficient: return 3;
    default: return 2;
  }
}

std::string format_sig(double value, int digits = 6) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return buffer;
}

void print_value_block(const std::string& title, const std::vector<std::string>& names,
                       const std::vector<double>& values) {
  std::size_t width = 0;
  for (const auto& name : names) width = std::max(width, name.size());
  std::cout << title << ":\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::cout << "  " << names[i] << std::string(width - names[i].size() + 2, ' ')
              << format_sig(values[i]) << "\n";
  }
}

// --- game solve -------------------------------------------------------------

struct GameSolveArgs {
  std::string file;
  bool as_json = false;
};

void run_game_solve(const GameSolveArgs& args) {
  const coalition::CoalitionGame game = coalition::load_game_file(args.file);
  const coalition::ShapleyAllocation allocation = coalition::shapley_by_subsets(game);

  if (args.as_json) {
    nlohmann::ordered_json doc;
    doc["players"] = game.players();
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < game.players().size(); ++i) {
      values[game.players()[i]] = allocation.values[i];
    }
    doc["shapley"] = std::move(values);
    doc["grand_worth"] = allocation.grand_worth;
    doc["distributed_total"] = allocation.distributed_total();
    std::cout << doc.dump(2) << "\n";
    return;
  }

  print_value_block("Shapley values", game.players(), allocation.values);
  std::cout << "Efficiency: distributed " << format_sig(allocation.distributed_total(), 12)
            << " of grand-coalition worth " << format_sig(allocation.grand_worth, 12) << "\n";
}

// --- experiment run ----------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  double noise_sd = 0.1;
  int trees = 100;
  std::string mode = "exact";
  int permutations = 2000;
  std::size_t background_cap = coalition::kDefaultBackgroundCap;
  std::string out_path;
  std::string format = "json";
  std::string dump_csv;
};

void run_experiment_cmd(const ExperimentArgs& args) {
  coalition::RunConfig config;
  config.experiment.name = coalition::parse_experiment(args.name);
  config.experiment.seed = args.seed;
  config.experiment.n = args.n;
  config.experiment.noise_sd = args.noise_sd;
  config.forest.n_trees = args.trees;
  config.forest.seed = args.seed;
  config.attribution.mode = coalition::parse_attribution_mode(args.mode);
  config.attribution.n_permutations = args.permutations;
  config.attribution.background_cap = args.background_cap;
  config.output.format = coalition::parse_report_format(args.format);
  config.output.path = args.out_path;
  config.validate();

  if (!args.dump_csv.empty()) {
    const coalition::Dataset data = coalition::generate(config.experiment);
    coalition::write_dataset_csv_file(args.dump_csv, data.features, data.target);
  }

  const coalition::ComparisonReport report = coalition::run_experiment(config);
  std::cout << coalition::format_report_table(report);
  if (!config.output.path.empty()) {
    coalition::emit_report(report, config.output.format, config.output.path);
    std::cout << "\nWrote " << coalition::to_string(config.output.format) << " report to "
              << config.output.path << "\n";
  }
}

// --- explain -----------------------------------------------------------------

struct ExplainArgs {
  std::string data_path;
  std::string target;
  std::string model = "ols";
  std::uint64_t seed = 0;
  int trees = 100;
  std::string mode = "exact";
  int permutations = 2000;
  std::size_t background_cap = coalition::kDefaultBackgroundCap;
};

void run_explain(const ExplainArgs& args) {
  const coalition::Dataset data =
      coalition::load_dataset_csv_file(args.data_path, args.target);

  std::optional<coalition::LinearModel> ols;
  std::optional<coalition::ForestModel> forest;
  coalition::PredictFn predict;
  if (args.model == "ols") {
    ols = coalition::fit_ols(data.features, data.target);
    predict = coalition::make_predictor(*ols);
  } else {
    coalition::ForestConfig config;
    config.n_trees = args.trees;
    config.seed = args.seed;
    config.validate();
    forest = coalition::fit_forest(data.features, data.target, config);
    predict = coalition::make_predictor(*forest);
  }

  const coalition::BackgroundSet background =
      coalition::make_background(data.features, args.background_cap, args.seed);
  coalition::AttributionOptions options;
  options.mode = coalition::parse_attribution_mode(args.mode);
  options.n_permutations = args.permutations;
  options.seed = args.seed;
  const coalition::AttributionResult attributions =
      coalition::attribute_all(predict, data.features, background, options);

  std::cout << "Model: " << args.model << ", " << data.features.row_count() << " instances, "
            << data.features.col_count() << " features\n";
  std::cout << "Base value: " << format_sig(attributions.base_value) << "\n\n";
  if (ols) {
    print_value_block("Linear Regression Coefficients", data.features.column_names(),
                      ols->coefficients);
    std::cout << "\n";
  }
  print_value_block("Mean Absolute SHAP Values", data.features.column_names(),
                    coalition::mean_abs_attribution(attributions));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley values for cooperative games and model attribution"};
  app.require_subcommand(1);

  auto* game = app.add_subcommand("game", "Characteristic-function game tools");
  game->require_subcommand(1);
  GameSolveArgs game_args;
  auto* solve = game->add_subcommand("solve", "Shapley values of a game JSON file");
  solve->add_option("file", game_args.file, "Game JSON file")->required();
  solve->add_flag("--json", game_args.as_json, "Machine-readable full-precision output");
  solve->callback([&] { run_game_solve(game_args); });

  auto* experiment = app.add_subcommand("experiment", "Benchmark experiments");
  experiment->require_subcommand(1);
  ExperimentArgs exp_args;
  auto* run = experiment->add_subcommand("run", "Generate, fit, attribute, and report");
  run->add_option("--name", exp_args.name, "Experiment name")
      ->required()
      ->check(CLI::IsMember({"linear3", "nonlinear3", "twofactor"}));
  run->add_option("--seed", exp_args.seed, "RNG seed (data, forest, sampling)");
  run->add_option("--n", exp_args.n, "Instance count");
  run->add_option("--noise-sd", exp_args.noise_sd, "Noise standard deviation");
  run->add_option("--trees", exp_args.trees, "Forest size");
  run->add_option("--mode", exp_args.mode, "Attribution mode")
      ->check(CLI::IsMember({"exact", "sampled"}));
  run->add_option("--permutations", exp_args.permutations, "Permutations in sampled mode");
  run->add_option("--background-cap", exp_args.background_cap, "Background subsample cap");
  run->add_option("--out", exp_args.out_path, "Report output path");
  run->add_option("--format", exp_args.format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "markdown"}));
  run->add_option("--dump-csv", exp_args.dump_csv, "Also write the generated dataset CSV");
  run->callback([&] { run_experiment_cmd(exp_args); });

  ExplainArgs explain_args;
  auto* explain = app.add_subcommand("explain", "Attribute a model fitted on a CSV dataset");
  explain->add_option("--data", explain_args.data_path, "CSV dataset with header row")
      ->required();
  explain->add_option("--target", explain_args.target, "Target column name")->required();
  explain->add_option("--model", explain_args.model, "Model family")
      ->check(CLI::IsMember({"ols", "forest"}));
  explain->add_option("--seed", explain_args.seed, "RNG seed (forest, background, sampling)");
  explain->add_option("--trees", explain_args.trees, "Forest size");
  explain->add_option("--mode", explain_args.mode, "Attribution mode")
      ->check(CLI::IsMember({"exact", "sampled"}));
  explain->add_option("--permutations", explain_args.permutations,
                      "Permutations in sampled mode");
  explain->add_option("--background-cap", explain_args.background_cap,
                      "Background subsample cap");
  explain->callback([&] { run_explain(explain_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const coalition::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
