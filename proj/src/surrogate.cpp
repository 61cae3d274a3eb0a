#include "mcbrp/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "mcbrp/error.hpp"
#include "mcbrp/rng.hpp"

namespace mcbrp {

namespace {

constexpr double kSingularRcond = 1e-12;
constexpr double kRidge = 1e-8;

struct BackgroundScale {
  std::vector<double> stddev;
  std::vector<std::size_t> active;
  std::vector<std::size_t> excluded;
};

BackgroundScale ScaleOf(const Dataset& background) {
  BackgroundScale scale;
  const std::size_t d = background.num_features();
  const std::size_t rows = background.num_rows();
  scale.stddev.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double v = background.rows()(i, j);
      const double delta = v - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (v - mean);
    }
    scale.stddev[j] = rows > 1 ? std::sqrt(m2 / static_cast<double>(rows - 1)) : 0.0;
    (scale.stddev[j] > 0.0 ? scale.active : scale.excluded).push_back(j);
  }
  return scale;
}

}  // namespace

ImportanceRanking LocalImportance(const Predictor& model, std::span<const double> x,
                                  RowId instance_id, const Dataset& background, std::size_t n,
                                  const SurrogateParams& params) {
  const std::size_t d = background.num_features();
  if (background.empty()) throw Error(ErrorCode::kEmptyDataset, "surrogate background is empty");
  if (x.size() != d || model.num_features() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("instance has {} values, background {}, model {}", x.size(), d,
                            model.num_features()));
  }
  if (n == 0 || n > d) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("n={} outside [1, {}]", n, d));
  }
  if (params.num_samples < 10 * d) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("num_samples={} below 10 x {} features", params.num_samples, d));
  }

  const BackgroundScale scale = ScaleOf(background);
  const std::size_t p = scale.active.size();
  if (p < n) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("only {} non-constant background features, cannot rank {}", p, n));
  }
  const double width = params.kernel_width > 0.0
                           ? params.kernel_width
                           : 0.75 * std::sqrt(static_cast<double>(p));

  const std::size_t samples = params.num_samples;
  auto rng = MakeStream(params.seed, StreamPurpose::kSurrogate,
                        static_cast<std::uint64_t>(instance_id));
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix perturbed(samples, d);
  Eigen::MatrixXd design(samples, p + 1);
  Eigen::VectorXd kernel(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    auto row = perturbed.row(s);
    std::copy(x.begin(), x.end(), row.begin());
    design(s, 0) = 1.0;
    double dist2 = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double z = normal(rng);
      const std::size_t j = scale.active[k];
      row[j] = x[j] + scale.stddev[j] * z;
      design(s, k + 1) = z;
      dist2 += z * z;
    }
    kernel(s) = std::exp(-dist2 / (width * width));
  }
  const std::vector<double> predicted = model.predict_batch(perturbed);
  const Eigen::Map<const Eigen::VectorXd> response(predicted.data(),
                                                   static_cast<Eigen::Index>(samples));

  ImportanceRanking result;
  result.instance_id = instance_id;
  result.n = n;
  result.excluded_features = scale.excluded;

  Eigen::VectorXd coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
  const auto [lo, hi] = std::minmax_element(predicted.begin(), predicted.end());
  const double kernel_sum = kernel.sum();
  if (!(kernel_sum > 0.0)) {
    // Every sample underflowed the kernel: the weighted design is all zeros.
    result.regularized = true;
  } else if (*lo != *hi) {
    const Eigen::MatrixXd weighted = design.array().colwise() * kernel.array();
    Eigen::MatrixXd normal_matrix = design.transpose() * weighted;
    const Eigen::VectorXd rhs = weighted.transpose() * response;
    Eigen::LDLT<Eigen::MatrixXd> solver(normal_matrix);
    if (solver.info() != Eigen::Success || solver.rcond() < kSingularRcond) {
      const double ridge = kRidge * std::max(1.0, normal_matrix.diagonal().maxCoeff());
      for (Eigen::Index k = 1; k < normal_matrix.rows(); ++k) normal_matrix(k, k) += ridge;
      solver.compute(normal_matrix);
      result.regularized = true;
    }
    coef = solver.solve(rhs);

    const double mean = kernel.dot(response) / kernel_sum;
    const Eigen::VectorXd fitted = design * coef;
    const double ss_tot = kernel.dot((response.array() - mean).square().matrix());
    const double ss_res = kernel.dot((response - fitted).array().square().matrix());
    if (ss_tot > 0.0) result.surrogate_fit_quality = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  }

  std::vector<RankedFeature> all;
  all.reserve(p);
  for (std::size_t k = 0; k < p; ++k) {
    all.push_back({scale.active[k], coef(static_cast<Eigen::Index>(k + 1))});
  }
  std::stable_sort(all.begin(), all.end(), [](const RankedFeature& a, const RankedFeature& b) {
    const double wa = std::abs(a.weight);
    const double wb = std::abs(b.weight);
    if (wa != wb) return wa > wb;
    return a.feature < b.feature;
  });
  all.resize(n);
  result.ranked_features = std::move(all);
  return result;
}

std::vector<FeatureFrequency> RankFrequency(std::span<const ImportanceRanking> rankings,
                                            const std::vector<std::string>& feature_names) {
  if (rankings.empty()) throw Error(ErrorCode::kInvalidArgument, "no rankings to aggregate");
  std::vector<std::size_t> counts(feature_names.size(), 0);
  std::size_t slots = 0;
  for (const auto& ranking : rankings) {
    for (const auto& item : ranking.ranked_features) {
      if (item.feature >= feature_names.size()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    fmt::format("ranked feature {} has no name", item.feature));
      }
      ++counts[item.feature];
      ++slots;
    }
  }
  std::vector<std::size_t> order(feature_names.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  std::vector<FeatureFrequency> table;
  table.reserve(order.size());
  const auto total = static_cast<double>(rankings.size());
  for (std::size_t j : order) {
    table.push_back({feature_names[j], static_cast<double>(counts[j]) / total,
                     slots > 0 ? static_cast<double>(counts[j]) / static_cast<double>(slots) : 0.0});
  }
  return table;
}

}  // namespace mcbrp
