#ifndef MCBRP_COMMANDS_HPP_
#define MCBRP_COMMANDS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "mcbrp/config.hpp"
#include "mcbrp/dataset.hpp"
#include "mcbrp/report.hpp"

namespace mcbrp {

// File names written under the output directory.
inline constexpr const char* kModelFile = "model.json";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kExplanationDir = "explanations";
inline constexpr const char* kOutOfRangeFile = "out_of_range.json";
inline constexpr const char* kRankFrequencyFile = "rank_frequency.csv";
inline constexpr const char* kPredictionsFile = "predictions.csv";

struct GenDataResult {
  std::filesystem::path path;
  std::size_t rows = 0;
  std::size_t outlier_rows = 0;
};

GenDataResult CmdGenData(const RunConfig& config, std::ostream& log);

RunSummary CmdTrain(const RunConfig& config, std::ostream& log);

struct ExplainSelector {
  std::optional<RowId> row;  // explain this row id...
  bool all_large = false;    // ...or every large-error instance
  bool force = false;        // permit reasonable-prediction rows
};

// Returns the paths of the JSON files written, in row-id order.
std::vector<std::filesystem::path> CmdExplain(const RunConfig& config,
                                              const ExplainSelector& selector, std::ostream& log);

struct ReportResult {
  std::optional<OutOfRangeStats> stats;  // empty when a group has no explained instances
  std::size_t unexplainable_large = 0;
  std::size_t unexplainable_reasonable = 0;
};

ReportResult CmdReport(const RunConfig& config, std::ostream& log);

std::filesystem::path ExplanationPath(const RunConfig& config, RowId id,
                                      const char* extension = ".json");

}  // namespace mcbrp

#endif  // MCBRP_COMMANDS_HPP_
