#ifndef MCBRP_PREDICTOR_HPP_
#define MCBRP_PREDICTOR_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mcbrp/dataset.hpp"
#include "mcbrp/matrix.hpp"

namespace mcbrp {

// Black-box regressor. Implementations must be pure and safe to call from
// many threads at once.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::size_t num_features() const = 0;
  virtual double predict(std::span<const double> x) const = 0;

  // Row-wise predict. Throws kDimensionMismatch on a column-count mismatch.
  virtual std::vector<double> predict_batch(const Matrix& rows) const;
};

// Wraps a plain function, mostly for tests and hand-built models.
class FunctionPredictor final : public Predictor {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  FunctionPredictor(std::size_t num_features, Fn fn)
      : num_features_(num_features), fn_(std::move(fn)) {}

  std::size_t num_features() const override { return num_features_; }
  double predict(std::span<const double> x) const override { return fn_(x); }

 private:
  std::size_t num_features_;
  Fn fn_;
};

// 1 - SS_res / SS_tot over the dataset. Throws kZeroVariance for a constant
// target and kEmptyDataset for no rows.
double RSquared(const Predictor& model, const Dataset& data);
double RSquared(std::span<const double> actual, std::span<const double> predicted);

}  // namespace mcbrp

#endif  // MCBRP_PREDICTOR_HPP_
