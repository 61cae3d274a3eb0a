#ifndef MCBRP_REPORT_HPP_
#define MCBRP_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

#include "mcbrp/dataset.hpp"
#include "mcbrp/explanation.hpp"
#include "mcbrp/predictor.hpp"
#include "mcbrp/surrogate.hpp"
#include "mcbrp/taxonomy.hpp"

namespace mcbrp {

// For each group, histogram[k] is the fraction of explanations with exactly k
// of their n features outside the reasonable range.
struct OutOfRangeStats {
  std::size_t n = 0;
  std::vector<double> histogram_large;
  std::vector<double> histogram_reasonable;
  double all_out_fraction_large = 0.0;
  double all_out_fraction_reasonable = 0.0;
  std::size_t count_large = 0;
  std::size_t count_reasonable = 0;
};

OutOfRangeStats ComputeOutOfRangeStats(std::span<const Explanation> large,
                                       std::span<const Explanation> reasonable);
nlohmann::json ToJson(const OutOfRangeStats& stats);

struct RunSummary {
  double r_squared = 0.0;
  double large_error_fraction = 0.0;
  double epsilon_large = 0.0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t large_count = 0;
  std::size_t reasonable_count = 0;
};

RunSummary MakeRunSummary(const Predictor& model, const SplitDataset& split,
                          const ErrorTaxonomy& taxonomy);
nlohmann::json ToJson(const RunSummary& summary);

// CSV with header row_id,actual,predicted,error,is_large (is_large is 0/1).
// Returns the taxonomy the is_large column was derived from.
ErrorTaxonomy WritePredictionDump(const Predictor& model, const Dataset& test,
                                  const std::filesystem::path& path);

// CSV with header group,feature,fraction,share; one block per group.
std::string FormatRankFrequency(std::span<const FeatureFrequency> large,
                                std::span<const FeatureFrequency> reasonable);

}  // namespace mcbrp

#endif  // MCBRP_REPORT_HPP_
