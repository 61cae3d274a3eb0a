#ifndef MCBRP_EXPLANATION_HPP_
#define MCBRP_EXPLANATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mcbrp/dataset.hpp"
#include "mcbrp/predictor.hpp"
#include "mcbrp/simulate.hpp"
#include "mcbrp/surrogate.hpp"
#include "mcbrp/taxonomy.hpp"

namespace mcbrp {

enum class RowStatus {
  kOk,
  kZeroWidth,             // accepted values were all identical
  kInsufficientEvidence,  // fewer than min_stratum accepted samples
  kSkipped,               // zero-width fences, nothing sampled
};

std::string_view ToString(RowStatus status);

struct ExplanationRow {
  std::string feature_name;
  std::size_t feature = 0;
  double importance = 0.0;  // signed surrogate weight
  double value = 0.0;       // observed value
  std::optional<ReasonableRange> range;
  std::optional<double> trend;
  std::string trend_text;
  bool out_of_range = false;  // only ever set when a range exists
  std::size_t stratum_size = 0;
  RowStatus status = RowStatus::kOk;
};

struct Explanation {
  RowId instance_id = 0;
  double actual = 0.0;
  double predicted = 0.0;
  double error = 0.0;
  double epsilon_large = 0.0;
  bool is_large = false;
  // False when no feature row has a usable range.
  bool explainable = false;
  ImportanceRanking ranking;
  std::vector<ExplanationRow> rows;

  std::size_t out_of_range_count() const;
};

struct ExplainParams {
  std::size_t n = 5;
  std::size_t m = 10000;
  std::uint64_t seed = 0;
  std::size_t min_stratum = 30;
  SurrogateParams surrogate;
  std::size_t workers = 1;
  // Allow explaining instances whose prediction was reasonable.
  bool force = false;
};

std::string TrendText(std::optional<double> trend);

// Explains test row `position`. `fences` must cover every feature (see
// ComputeAllFeatureFences). Never throws for lack of evidence; check
// `explainable` instead.
Explanation ExplainInstance(const Predictor& model, const Dataset& test, std::size_t position,
                            const ErrorTaxonomy& taxonomy, std::span<const FeatureFences> fences,
                            const ExplainParams& params);

// Same as ExplainInstance, but computes the fences itself and throws
// kInsufficientEvidence when the instance cannot be explained.
Explanation Explain(const Predictor& model, const Dataset& test, std::size_t position,
                    const ErrorTaxonomy& taxonomy, const ExplainParams& params);

nlohmann::json ToJson(const Explanation& explanation);

// Aligned table with the columns Input, Definition, Trend, Value and
// Reasonable range, preceded by a one-line summary of the prediction.
std::string RenderTable(const Explanation& explanation);

}  // namespace mcbrp

#endif  // MCBRP_EXPLANATION_HPP_
