// Command-line front end: gen-data, train, explain, report.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mcbrp/commands.hpp"
#include "mcbrp/config.hpp"
#include "mcbrp/error.hpp"

namespace {

const std::map<std::string, std::string>& FlagHelp() {
  static const std::map<std::string, std::string> help = {
      {"data", "input CSV (default <output_dir>/data.csv)"},
      {"output_dir", "output directory (default $MCBRP_OUTPUT_DIR or mcbrp_out)"},
      {"create_output_dir", "create a missing output directory (true/false)"},
      {"target_column", "name of the target column"},
      {"id_column", "column holding row ids; empty for load order"},
      {"drop_policy", "rows with missing or non-numeric cells: reject | drop-row"},
      {"split_column", "column used for the train/test split"},
      {"split_threshold", "rows with split_column < threshold train, the rest test"},
      {"keep_split_column", "keep the split column as a feature (true/false)"},
      {"num_features", "synthetic feature count"},
      {"num_rows", "synthetic row count"},
      {"outlier_fraction", "synthetic share of out-of-distribution rows, in [0, 0.2]"},
      {"noise_sd", "synthetic target noise standard deviation"},
      {"first_year", "synthetic first year"},
      {"last_year", "synthetic last year"},
      {"n_trees", "boosting stages"},
      {"max_depth", "maximum tree depth"},
      {"learning_rate", "shrinkage in (0, 1]"},
      {"min_samples_leaf", "minimum training rows per leaf"},
      {"n", "number of important features explained"},
      {"m", "Monte Carlo perturbations per feature"},
      {"min_stratum", "accepted perturbations needed for a reasonable range"},
      {"seed", "base random seed"},
      {"num_samples", "local surrogate sample count"},
      {"kernel_width", "local surrogate kernel width; 0 = 0.75 * sqrt(d)"},
      {"workers", "worker threads"},
      {"max_reasonable", "report: cap on reasonable instances explained; 0 = all"},
  };
  return help;
}

struct Overrides {
  std::map<std::string, std::string> values;
  std::string config_path;
};

void AddConfigFlags(CLI::App* sub, Overrides& overrides) {
  sub->add_option("--config", overrides.config_path, "JSON run configuration");
  const nlohmann::json defaults = mcbrp::ToJson(mcbrp::RunConfig{});
  for (const auto& [key, value] : defaults.items()) {
    auto it = FlagHelp().find(key);
    sub->add_option("--" + key, overrides.values[key], it != FlagHelp().end() ? it->second : key);
  }
}

mcbrp::RunConfig ResolveConfig(const CLI::App* sub, const Overrides& overrides) {
  nlohmann::json doc = nlohmann::json::object();
  if (!overrides.config_path.empty()) {
    doc = mcbrp::ToJson(mcbrp::LoadRunConfig(overrides.config_path));
  }
  const nlohmann::json defaults = mcbrp::ToJson(mcbrp::RunConfig{});
  for (const auto& [key, text] : overrides.values) {
    if (sub->count("--" + key) == 0) continue;
    if (defaults.at(key).is_string()) {
      doc[key] = text;
      continue;
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
      throw mcbrp::Error(mcbrp::ErrorCode::kInvalidArgument,
                         "--" + key + ": cannot parse '" + text + "'");
    }
    const bool ok = defaults.at(key).is_boolean() ? parsed.is_boolean() : parsed.is_number();
    if (!ok) {
      throw mcbrp::Error(mcbrp::ErrorCode::kInvalidArgument,
                         "--" + key + ": unexpected value '" + text + "'");
    }
    doc[key] = parsed;
  }
  return mcbrp::RunConfigFromJson(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrastive explanations for large errors of a tree-ensemble regressor"};
  app.require_subcommand(1);

  Overrides gen_flags, train_flags, explain_flags, report_flags;
  auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset CSV");
  AddConfigFlags(gen, gen_flags);
  auto* train = app.add_subcommand("train", "fit the model and write model.json and summary.json");
  AddConfigFlags(train, train_flags);
  auto* explain = app.add_subcommand("explain", "explain one test row or every large error");
  AddConfigFlags(explain, explain_flags);
  mcbrp::RowId row = 0;
  mcbrp::ExplainSelector selector;
  auto* row_opt = explain->add_option("--row", row, "row id of a test instance");
  auto* all_opt = explain->add_flag("--all_large,--all-large", selector.all_large,
                                    "explain every large-error instance");
  row_opt->excludes(all_opt);
  explain->add_flag("--force", selector.force, "allow explaining a reasonable prediction");
  auto* report = app.add_subcommand(
      "report", "write out_of_range.json, rank_frequency.csv and predictions.csv");
  AddConfigFlags(report, report_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      mcbrp::CmdGenData(ResolveConfig(gen, gen_flags), std::cout);
    } else if (train->parsed()) {
      mcbrp::CmdTrain(ResolveConfig(train, train_flags), std::cout);
    } else if (explain->parsed()) {
      if (row_opt->count() > 0) selector.row = row;
      mcbrp::CmdExplain(ResolveConfig(explain, explain_flags), selector, std::cout);
    } else if (report->parsed()) {
      mcbrp::CmdReport(ResolveConfig(report, report_flags), std::cout);
    }
  } catch (const mcbrp::Error& e) {
    std::cerr << "error (" << mcbrp::ToString(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
