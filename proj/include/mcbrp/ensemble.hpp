#ifndef MCBRP_ENSEMBLE_HPP_
#define MCBRP_ENSEMBLE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcbrp/dataset.hpp"
#include "mcbrp/predictor.hpp"

namespace mcbrp {

// Binary regression tree stored as flat node arrays. Internal nodes route
// x[feature] <= threshold to `left`; leaves have feature == kLeaf.
class RegressionTree {
 public:
  static constexpr std::int32_t kLeaf = -1;

  struct Node {
    std::int32_t feature = kLeaf;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    friend bool operator==(const Node&, const Node&) = default;
  };

  RegressionTree() = default;
  RegressionTree(std::vector<Node> nodes, int max_depth);

  double predict(std::span<const double> x) const {
    std::int32_t i = 0;
    while (nodes_[i].feature != kLeaf) {
      const Node& n = nodes_[i];
      i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes_[i].value;
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int max_depth() const noexcept { return max_depth_; }
  // Longest root-to-leaf path, in edges.
  int depth() const;

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::vector<Node> nodes_{Node{}};
  int max_depth_ = 0;
};

struct GbrParams {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 1;
  // Recorded for provenance; no subsampling is done, so fits do not consume it.
  std::uint64_t seed = 0;
};

// Least-squares gradient boosting: init_value + learning_rate * sum(trees).
class GbrModel final : public Predictor {
 public:
  GbrModel(double init_value, double learning_rate, std::vector<RegressionTree> trees,
           std::vector<std::string> feature_names);

  std::size_t num_features() const override { return feature_names_.size(); }
  double predict(std::span<const double> x) const override;
  std::vector<double> predict_batch(const Matrix& rows) const override;

  // Prediction using only the first `stages` trees.
  double predict_staged(std::span<const double> x, std::size_t stages) const;

  double init_value() const noexcept { return init_value_; }
  double learning_rate() const noexcept { return learning_rate_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  nlohmann::json to_json() const;
  static GbrModel from_json(const nlohmann::json& doc);

  void save(const std::filesystem::path& path) const;
  static GbrModel load(const std::filesystem::path& path);

 private:
  double init_value_;
  double learning_rate_;
  std::vector<RegressionTree> trees_;
  std::vector<std::string> feature_names_;
};

// Exact greedy split search over sorted unique values with midpoint
// thresholds; ties go to the lowest feature index, then the lowest threshold.
// When stage_loss is given it receives the training MSE after the init value
// and after every stage (n_trees + 1 entries).
GbrModel FitGbr(const Dataset& train, const GbrParams& params,
                std::vector<double>* stage_loss = nullptr);

}  // namespace mcbrp

#endif  // MCBRP_ENSEMBLE_HPP_
