#include "mcbrp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mcbrp/error.hpp"

namespace mcbrp {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    RunConfig, data, output_dir, create_output_dir, target_column, id_column, drop_policy,
    split_column, split_threshold, keep_split_column, num_features, num_rows, outlier_fraction,
    noise_sd, first_year, last_year, n_trees, max_depth, learning_rate, min_samples_leaf, n, m,
    min_stratum, seed, num_samples, kernel_width, workers, max_reasonable)

std::string DefaultOutputDir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : std::string("mcbrp_out");
}

std::filesystem::path RunConfig::data_path() const {
  if (!data.empty()) return data;
  return std::filesystem::path(output_dir) / "data.csv";
}

SyntheticSpec RunConfig::synthetic_spec() const {
  return {num_features, num_rows, outlier_fraction, noise_sd, first_year, last_year};
}

GbrParams RunConfig::gbr_params() const {
  return {n_trees, max_depth, learning_rate, min_samples_leaf, seed};
}

ExplainParams RunConfig::explain_params() const {
  ExplainParams p;
  p.n = n;
  p.m = m;
  p.seed = seed;
  p.min_stratum = min_stratum;
  p.surrogate.num_samples = num_samples;
  p.surrogate.kernel_width = kernel_width;
  p.surrogate.seed = seed;
  p.workers = workers;
  return p;
}

CsvOptions RunConfig::csv_options() const {
  CsvOptions options;
  options.target_column = target_column;
  options.drop_policy = ParseDropPolicy(drop_policy);
  if (!id_column.empty()) options.id_column = id_column;
  return options;
}

nlohmann::json ToJson(const RunConfig& config) {
  nlohmann::json doc = config;
  return doc;
}

RunConfig RunConfigFromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kFormat, "config must be a JSON object");
  const nlohmann::json known = RunConfig{};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::kFormat, fmt::format("unknown config key '{}'", key));
  }
  RunConfig config;
  try {
    config = doc.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, fmt::format("bad config value: {}", e.what()));
  }
  if (config.output_dir.empty()) config.output_dir = DefaultOutputDir();
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return RunConfigFromJson(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, fmt::format("config '{}' is not JSON: {}", path.string(), e.what()));
  }
}

void Validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, fmt::format("invalid config: {}", what));
  };
  require(!c.output_dir.empty(), "output_dir is empty");
  require(!c.target_column.empty(), "target_column is empty");
  require(!c.split_column.empty(), "split_column is empty");
  require(c.drop_policy == "reject" || c.drop_policy == "drop-row",
          "drop_policy must be reject or drop-row");
  require(c.num_features >= 2, "num_features must be >= 2");
  require(c.num_rows >= 100, "num_rows must be >= 100");
  require(c.outlier_fraction >= 0.0 && c.outlier_fraction <= 0.2, "outlier_fraction outside [0, 0.2]");
  require(c.noise_sd >= 0.0, "noise_sd must be >= 0");
  require(c.first_year <= c.last_year, "first_year after last_year");
  require(c.n_trees > 0, "n_trees must be positive");
  require(c.max_depth > 0, "max_depth must be positive");
  require(c.learning_rate > 0.0 && c.learning_rate <= 1.0, "learning_rate outside (0, 1]");
  require(c.min_samples_leaf > 0, "min_samples_leaf must be positive");
  require(c.n > 0, "n must be positive");
  require(c.m > 0, "m must be positive");
  require(c.min_stratum >= 2, "min_stratum must be >= 2");
  require(c.num_samples > 0, "num_samples must be positive");
  require(c.kernel_width >= 0.0, "kernel_width must be >= 0 (0 = automatic)");
  require(c.workers > 0, "workers must be positive");
}

}  // namespace mcbrp
