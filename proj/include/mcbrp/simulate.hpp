#ifndef MCBRP_SIMULATE_HPP_
#define MCBRP_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcbrp/dataset.hpp"
#include "mcbrp/predictor.hpp"
#include "mcbrp/surrogate.hpp"
#include "mcbrp/taxonomy.hpp"

namespace mcbrp {

struct SimulatedSample {
  double value = 0.0;       // sampled value of the perturbed feature
  double prediction = 0.0;  // model output on the perturbed instance
  bool accepted = false;    // |prediction - actual| < epsilon_large
};

// All perturbations of one feature. Every other coordinate keeps the
// instance's original value.
struct FeatureStratum {
  std::size_t feature = 0;
  FeatureFences fences;
  std::vector<SimulatedSample> samples;
  std::size_t accepted_count = 0;
  // Zero-width fences: nothing was sampled.
  bool skipped = false;

  std::vector<double> accepted_values() const;
  std::vector<double> accepted_predictions() const;
};

struct SimulationResult {
  RowId instance_id = 0;
  std::vector<FeatureStratum> strata;  // in ranking order
};

struct SimulationParams {
  std::size_t m = 10000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Monte Carlo perturbation of `instance`: for every ranked feature, m values
// are drawn uniformly inside its fences and substituted one at a time. The
// draws for (instance_id, feature) come from their own stream and predictions
// are written by sample index, so the result is the same for any worker count.
SimulationResult Simulate(const Predictor& model, std::span<const double> instance,
                          RowId instance_id, double actual, const ImportanceRanking& ranking,
                          double epsilon_large, std::span<const FeatureFences> fences,
                          const SimulationParams& params);

struct ReasonableRange {
  double low = 0.0;
  double high = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // n - 1 denominator
  bool zero_width() const noexcept { return stddev == 0.0; }
};

// [mean - sd, mean + sd] of the accepted values, or nullopt when fewer than
// min_stratum values (or fewer than 2) were accepted.
std::optional<ReasonableRange> ComputeBounds(std::span<const double> values,
                                             std::size_t min_stratum);

// Pearson correlation of values against predictions; nullopt when either side
// has zero variance or fewer than 2 points.
std::optional<double> ComputeTrend(std::span<const double> values,
                                   std::span<const double> predictions);

}  // namespace mcbrp

#endif  // MCBRP_SIMULATE_HPP_
