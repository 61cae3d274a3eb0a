#ifndef MCBRP_SURROGATE_HPP_
#define MCBRP_SURROGATE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcbrp/dataset.hpp"
#include "mcbrp/predictor.hpp"

namespace mcbrp {

struct RankedFeature {
  std::size_t feature = 0;
  // Coefficient of the local fit times the background std of the feature.
  double weight = 0.0;

  friend bool operator==(const RankedFeature&, const RankedFeature&) = default;
};

struct ImportanceRanking {
  RowId instance_id = 0;
  std::size_t n = 0;
  // Sorted by |weight| descending, ties by ascending feature index.
  std::vector<RankedFeature> ranked_features;
  // Weighted R^2 of the local linear fit; 0 when the response is constant.
  double surrogate_fit_quality = 0.0;
  // Features with zero background spread; never ranked.
  std::vector<std::size_t> excluded_features;
  // Set when the weighted normal equations needed a ridge term.
  bool regularized = false;

  friend bool operator==(const ImportanceRanking&, const ImportanceRanking&) = default;
};

struct SurrogateParams {
  std::size_t num_samples = 5000;
  // Kernel width in standardized units; <= 0 selects 0.75 * sqrt(active features).
  double kernel_width = 0.0;
  std::uint64_t seed = 0;
};

// Proximity-weighted linear surrogate around x. Samples are Gaussian around x
// with the background's per-feature std; weights are exp(-dist^2 / width^2)
// with dist measured in standardized coordinates. The sample stream is keyed
// by (seed, instance_id), so results do not depend on call order.
ImportanceRanking LocalImportance(const Predictor& model, std::span<const double> x,
                                  RowId instance_id, const Dataset& background, std::size_t n,
                                  const SurrogateParams& params);

struct FeatureFrequency {
  std::string feature;
  // Share of rankings containing the feature.
  double fraction = 0.0;
  // Share of all ranked slots held by the feature; sums to 1 over features.
  double share = 0.0;
};

// Ordered by fraction descending, then by feature index. Every name in
// feature_names appears, including those never ranked.
std::vector<FeatureFrequency> RankFrequency(std::span<const ImportanceRanking> rankings,
                                            const std::vector<std::string>& feature_names);

}  // namespace mcbrp

#endif  // MCBRP_SURROGATE_HPP_
