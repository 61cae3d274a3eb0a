#include "mcbrp/predictor.hpp"

#include <fmt/format.h>

#include "mcbrp/error.hpp"

namespace mcbrp {

std::vector<double> Predictor::predict_batch(const Matrix& rows) const {
  if (rows.empty()) return {};
  if (rows.cols() != num_features()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("batch has {} columns, predictor expects {}", rows.cols(),
                            num_features()));
  }
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict(rows.row(i));
  return out;
}

double RSquared(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "actual and predicted lengths differ");
  }
  if (actual.empty()) throw Error(ErrorCode::kEmptyDataset, "R^2 of an empty dataset");
  double mean = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    mean += (actual[i] - mean) / static_cast<double>(i + 1);
  }
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  }
  if (ss_tot == 0.0) throw Error(ErrorCode::kZeroVariance, "target has zero variance; R^2 undefined");
  return 1.0 - ss_res / ss_tot;
}

double RSquared(const Predictor& model, const Dataset& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "R^2 of an empty dataset");
  const auto predicted = model.predict_batch(data.rows());
  return RSquared(data.target(), predicted);
}

}  // namespace mcbrp
