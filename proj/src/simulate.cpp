#include "mcbrp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "mcbrp/error.hpp"
#include "mcbrp/parallel.hpp"
#include "mcbrp/rng.hpp"

namespace mcbrp {

std::vector<double> FeatureStratum::accepted_values() const {
  std::vector<double> out;
  out.reserve(accepted_count);
  for (const auto& s : samples) {
    if (s.accepted) out.push_back(s.value);
  }
  return out;
}

std::vector<double> FeatureStratum::accepted_predictions() const {
  std::vector<double> out;
  out.reserve(accepted_count);
  for (const auto& s : samples) {
    if (s.accepted) out.push_back(s.prediction);
  }
  return out;
}

namespace {

constexpr std::size_t kChunk = 1024;

}  // namespace

SimulationResult Simulate(const Predictor& model, std::span<const double> instance,
                          RowId instance_id, double actual, const ImportanceRanking& ranking,
                          double epsilon_large, std::span<const FeatureFences> fences,
                          const SimulationParams& params) {
  if (params.m == 0) throw Error(ErrorCode::kInvalidArgument, "m must be at least 1");
  if (instance.size() != model.num_features()) {
    throw Error(ErrorCode::kDimensionMismatch, "instance width differs from the model's");
  }

  SimulationResult result;
  result.instance_id = instance_id;
  result.strata.reserve(ranking.ranked_features.size());

  struct Job {
    std::size_t stratum;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Job> jobs;
  std::vector<Matrix> batches;

  for (const auto& ranked : ranking.ranked_features) {
    auto it = std::find_if(fences.begin(), fences.end(),
                           [&](const FeatureFences& f) { return f.feature == ranked.feature; });
    if (it == fences.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("no fences supplied for feature {}", ranked.feature));
    }
    FeatureStratum stratum;
    stratum.feature = ranked.feature;
    stratum.fences = *it;
    if (!(it->width() > 0.0)) {
      stratum.skipped = true;
      result.strata.push_back(std::move(stratum));
      batches.emplace_back();
      continue;
    }
    auto rng = MakeStream(params.seed, StreamPurpose::kSimulation,
                          static_cast<std::uint64_t>(instance_id), ranked.feature);
    std::uniform_real_distribution<double> draw(it->lower, it->upper);
    stratum.samples.resize(params.m);
    Matrix batch(params.m, instance.size());
    for (std::size_t i = 0; i < params.m; ++i) {
      const double v = draw(rng);
      stratum.samples[i].value = v;
      auto row = batch.row(i);
      std::copy(instance.begin(), instance.end(), row.begin());
      row[ranked.feature] = v;
    }
    const std::size_t index = result.strata.size();
    for (std::size_t b = 0; b < params.m; b += kChunk) {
      jobs.push_back({index, b, std::min(params.m, b + kChunk)});
    }
    result.strata.push_back(std::move(stratum));
    batches.push_back(std::move(batch));
  }

  ParallelFor(jobs.size(), params.workers, [&](std::size_t first, std::size_t last) {
    for (std::size_t j = first; j < last; ++j) {
      const Job& job = jobs[j];
      auto& samples = result.strata[job.stratum].samples;
      const Matrix& batch = batches[job.stratum];
      for (std::size_t i = job.begin; i < job.end; ++i) {
        const double prediction = model.predict(batch.row(i));
        samples[i].prediction = prediction;
        samples[i].accepted = std::abs(prediction - actual) < epsilon_large;
      }
    }
  });

  for (auto& stratum : result.strata) {
    stratum.accepted_count = static_cast<std::size_t>(
        std::count_if(stratum.samples.begin(), stratum.samples.end(),
                      [](const SimulatedSample& s) { return s.accepted; }));
  }
  return result;
}

namespace {

bool AllEqual(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
}

// Two passes over in-memory data; a running update loses digits when the
// spread is small next to the magnitude.
double Mean(std::span<const double> v) {
  if (AllEqual(v)) return v.front();
  double sum = 0.0;
  for (double e : v) sum += e;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::optional<ReasonableRange> ComputeBounds(std::span<const double> values,
                                             std::size_t min_stratum) {
  if (values.size() < std::max<std::size_t>(min_stratum, 2)) return std::nullopt;
  const double mean = Mean(values);
  double m2 = 0.0;
  for (double v : values) m2 += (v - mean) * (v - mean);
  ReasonableRange range;
  range.mean = mean;
  range.stddev = std::sqrt(m2 / static_cast<double>(values.size() - 1));
  range.low = mean - range.stddev;
  range.high = mean + range.stddev;
  return range;
}

std::optional<double> ComputeTrend(std::span<const double> values,
                                   std::span<const double> predictions) {
  if (values.size() != predictions.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "trend inputs differ in length");
  }
  if (values.size() < 2 || AllEqual(values) || AllEqual(predictions)) return std::nullopt;
  const double mean_x = Mean(values);
  const double mean_y = Mean(predictions);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dx = values[i] - mean_x;
    const double dy = predictions[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0 && syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace mcbrp
