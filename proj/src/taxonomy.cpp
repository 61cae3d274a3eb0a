#include "mcbrp/taxonomy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mcbrp/error.hpp"

namespace mcbrp {

double Quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kEmptyDataset, "quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("quantile level {} outside [0, 1]", q));
  }
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "quantile of non-finite data");
  }
  std::sort(sorted.begin(), sorted.end());
  const double position = q * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(position));
  if (below + 1 >= sorted.size()) return sorted.back();
  const double fraction = position - static_cast<double>(below);
  if (fraction == 0.0) return sorted[below];
  return sorted[below] + fraction * (sorted[below + 1] - sorted[below]);
}

ErrorTaxonomy ClassifyErrors(std::span<const double> actual, std::span<const double> predicted,
                             std::span<const RowId> row_ids) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} actual values but {} predictions", actual.size(), predicted.size()));
  }
  if (!row_ids.empty() && row_ids.size() != actual.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "row id count differs from value count");
  }
  if (actual.empty()) throw Error(ErrorCode::kEmptyDataset, "no predictions to classify");

  ErrorTaxonomy taxonomy;
  taxonomy.errors.resize(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    taxonomy.errors[i] = std::abs(actual[i] - predicted[i]);
  }
  taxonomy.q1 = Quantile(taxonomy.errors, 0.25);
  taxonomy.q3 = Quantile(taxonomy.errors, 0.75);
  taxonomy.epsilon_large = taxonomy.q3 + 1.5 * (taxonomy.q3 - taxonomy.q1);
  taxonomy.is_large.resize(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const RowId id = row_ids.empty() ? static_cast<RowId>(i) : row_ids[i];
    const bool large = taxonomy.errors[i] > taxonomy.epsilon_large;
    taxonomy.is_large[i] = large;
    (large ? taxonomy.large_ids : taxonomy.reasonable_ids).push_back(id);
  }
  return taxonomy;
}

FeatureFences ComputeFeatureFences(const Dataset& test, const ErrorTaxonomy& taxonomy,
                                   std::size_t feature) {
  if (taxonomy.size() != test.num_rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "taxonomy was not computed on this dataset");
  }
  if (feature >= test.num_features()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("feature index {} out of range", feature));
  }
  std::vector<double> values;
  values.reserve(taxonomy.reasonable_ids.size());
  for (std::size_t i = 0; i < test.num_rows(); ++i) {
    if (!taxonomy.is_large[i]) values.push_back(test.rows()(i, feature));
  }
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyPartition, "no reasonable predictions to derive fences from");
  }
  const double q1 = Quantile(values, 0.25);
  const double q3 = Quantile(values, 0.75);
  const double iqr = q3 - q1;
  return {feature, q1 - 1.5 * iqr, q3 + 1.5 * iqr};
}

std::vector<FeatureFences> ComputeAllFeatureFences(const Dataset& test,
                                                   const ErrorTaxonomy& taxonomy) {
  std::vector<FeatureFences> fences;
  fences.reserve(test.num_features());
  for (std::size_t j = 0; j < test.num_features(); ++j) {
    fences.push_back(ComputeFeatureFences(test, taxonomy, j));
  }
  return fences;
}

}  // namespace mcbrp
