#ifndef MCBRP_CONFIG_HPP_
#define MCBRP_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "mcbrp/dataset.hpp"
#include "mcbrp/ensemble.hpp"
#include "mcbrp/explanation.hpp"

namespace mcbrp {

// Environment variable consulted for the default output directory.
inline constexpr const char* kOutputDirEnv = "MCBRP_OUTPUT_DIR";

// Flat run configuration. The JSON keys equal the field names, and every key
// doubles as a command-line flag (--<key>).
struct RunConfig {
  // Input CSV; empty means <output_dir>/data.csv.
  std::string data;
  std::string output_dir;
  bool create_output_dir = true;

  std::string target_column = "sales";
  // Empty means row ids are the 0-based data-line index.
  std::string id_column = "id";
  std::string drop_policy = "drop-row";
  std::string split_column = "year";
  double split_threshold = 2014;
  bool keep_split_column = false;

  // Synthetic data (gen-data).
  std::size_t num_features = 10;
  std::size_t num_rows = 5000;
  double outlier_fraction = 0.05;
  double noise_sd = 1.0;
  int first_year = 2010;
  int last_year = 2015;

  // Boosting.
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 1;

  // Explanations.
  std::size_t n = 5;
  std::size_t m = 10000;
  std::size_t min_stratum = 30;
  std::uint64_t seed = 42;
  std::size_t num_samples = 5000;
  // 0 selects 0.75 * sqrt(feature count).
  double kernel_width = 0.0;
  std::size_t workers = 1;
  // Cap on reasonable-prediction instances explained by `report`; 0 = all.
  std::size_t max_reasonable = 0;

  std::filesystem::path data_path() const;

  SyntheticSpec synthetic_spec() const;
  GbrParams gbr_params() const;
  ExplainParams explain_params() const;
  CsvOptions csv_options() const;
};

// Output directory from the environment, or "mcbrp_out".
std::string DefaultOutputDir();

nlohmann::json ToJson(const RunConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig RunConfigFromJson(const nlohmann::json& doc);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Throws kInvalidArgument on non-positive counts and out-of-range values.
void Validate(const RunConfig& config);

}  // namespace mcbrp

#endif  // MCBRP_CONFIG_HPP_
