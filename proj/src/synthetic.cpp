#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "mcbrp/dataset.hpp"
#include "mcbrp/error.hpp"
#include "mcbrp/rng.hpp"

namespace mcbrp {

namespace {

// Generating model, in standardized units u_j = (x_j - center_j) / scale_j:
//
//   sales = 1000 + sum_j w_j * g_j(u_j) + 2 * u_0 * u_1 + noise
//
//   center_j = 100 (j + 1),  scale_j = 10 (j + 1)
//   w_j      = 10 * 0.7^j, negated for j = 3, 7, 11, ...
//   g_j(u)   = u                       (j mod 3 == 0)
//            = u + 0.15 u |u|          (j mod 3 == 1)
//            = (exp(0.3 u) - 1) / 0.3  (j mod 3 == 2)
//
// Bulk u_j are standard normal truncated to |u| <= 3. Outlier rows get 1-3 of
// their features overwritten with u in [7, 10] while the target keeps using
// the original values, so the recorded features no longer explain the sales.
constexpr double kIntercept = 1000.0;
constexpr double kInteraction = 2.0;
constexpr double kBulkLimit = 3.0;
constexpr double kOutlierLow = 7.0;
constexpr double kOutlierHigh = 10.0;
constexpr std::size_t kMaxCorrupted = 3;

double Center(std::size_t j) { return 100.0 * static_cast<double>(j + 1); }
double Scale(std::size_t j) { return 10.0 * static_cast<double>(j + 1); }

double Weight(std::size_t j) {
  const double w = 10.0 * std::pow(0.7, static_cast<double>(j));
  return j % 4 == 3 ? -w : w;
}

double Shape(std::size_t j, double u) {
  switch (j % 3) {
    case 0: return u;
    case 1: return u + 0.15 * u * std::abs(u);
    default: return (std::exp(0.3 * u) - 1.0) / 0.3;
  }
}

std::size_t OutlierCount(double fraction, std::size_t rows) {
  const double exact = fraction * static_cast<double>(rows);
  const double nearest = std::round(exact);
  if (std::abs(exact - nearest) < 1e-9) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(exact));
}

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.num_features < 2) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic data needs at least 2 features");
  }
  if (spec.num_rows < 100) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic data needs at least 100 rows");
  }
  if (!(spec.outlier_fraction >= 0.0 && spec.outlier_fraction <= 0.2)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("outlier_fraction {} outside [0, 0.2]", spec.outlier_fraction));
  }
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_sd must be finite and non-negative");
  }
  if (spec.first_year > spec.last_year) {
    throw Error(ErrorCode::kInvalidArgument, "first_year after last_year");
  }

  const std::size_t d = spec.num_features;
  const std::size_t n = spec.num_rows;
  auto rng = MakeStream(seed, StreamPurpose::kSynthetic);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> year_dist(spec.first_year, spec.last_year);

  Matrix latent(n, d);
  std::vector<double> years(n);
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double u = normal(rng);
      while (std::abs(u) > kBulkLimit) u = normal(rng);
      latent(i, j) = u;
    }
    years[i] = year_dist(rng);
    double t = kIntercept + kInteraction * latent(i, 0) * latent(i, 1);
    for (std::size_t j = 0; j < d; ++j) t += Weight(j) * Shape(j, latent(i, j));
    target[i] = t + spec.noise_sd * normal(rng);
  }

  Matrix observed(n, d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) observed(i, j) = Center(j) + Scale(j) * latent(i, j);
    observed(i, d) = years[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> outliers(order.begin(),
                                    order.begin() + static_cast<std::ptrdiff_t>(
                                                        OutlierCount(spec.outlier_fraction, n)));
  std::sort(outliers.begin(), outliers.end());

  std::uniform_int_distribution<std::size_t> count_dist(1, std::min(kMaxCorrupted, d));
  std::uniform_real_distribution<double> magnitude(kOutlierLow, kOutlierHigh);
  std::vector<std::size_t> features(d);
  for (std::size_t row : outliers) {
    std::iota(features.begin(), features.end(), 0);
    std::shuffle(features.begin(), features.end(), rng);
    const std::size_t k = count_dist(rng);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t j = features[c];
      observed(row, j) = Center(j) + Scale(j) * magnitude(rng);
    }
  }

  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back(fmt::format("x{}", j));
  names.push_back("year");
  std::vector<RowId> ids(n);
  std::iota(ids.begin(), ids.end(), RowId{0});

  SyntheticData out;
  out.outlier_rows.assign(outliers.begin(), outliers.end());
  out.dataset = Dataset(std::move(names), std::move(observed), std::move(target), std::move(ids),
                        "sales");
  return out;
}

}  // namespace mcbrp
