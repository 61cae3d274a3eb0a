#ifndef MCBRP_TAXONOMY_HPP_
#define MCBRP_TAXONOMY_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mcbrp/dataset.hpp"

namespace mcbrp {

// Linear interpolation between order statistics at rank q * (len - 1).
double Quantile(std::span<const double> values, double q);

// Split of a test set into reasonable (R) and large-error (L) predictions.
// Position i of every per-row vector refers to the i-th test row.
struct ErrorTaxonomy {
  std::vector<double> errors;  // |actual - predicted|
  std::vector<bool> is_large;
  double q1 = 0.0;
  double q3 = 0.0;
  double epsilon_large = 0.0;  // q3 + 1.5 (q3 - q1)
  std::vector<RowId> reasonable_ids;
  std::vector<RowId> large_ids;

  std::size_t size() const noexcept { return errors.size(); }
};

// A row is a large error iff its absolute error is strictly above
// epsilon_large. Without row ids, positions are used as ids.
ErrorTaxonomy ClassifyErrors(std::span<const double> actual, std::span<const double> predicted,
                             std::span<const RowId> row_ids = {});

struct FeatureFences {
  std::size_t feature = 0;
  double lower = 0.0;
  double upper = 0.0;

  double width() const noexcept { return upper - lower; }
};

// Tukey's fences [Q1 - 1.5 IQR, Q3 + 1.5 IQR] of one feature over the rows of
// `test` that the taxonomy marks reasonable.
FeatureFences ComputeFeatureFences(const Dataset& test, const ErrorTaxonomy& taxonomy,
                                   std::size_t feature);
std::vector<FeatureFences> ComputeAllFeatureFences(const Dataset& test,
                                                   const ErrorTaxonomy& taxonomy);

}  // namespace mcbrp

#endif  // MCBRP_TAXONOMY_HPP_
