#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mcbrp/ensemble.hpp"
#include "mcbrp/error.hpp"

namespace mcbrp {

RegressionTree::RegressionTree(std::vector<Node> nodes, int max_depth)
    : nodes_(std::move(nodes)), max_depth_(max_depth) {
  if (nodes_.empty()) throw Error(ErrorCode::kFormat, "tree has no nodes");
  const auto count = static_cast<std::int32_t>(nodes_.size());
  for (std::int32_t i = 0; i < count; ++i) {
    const Node& n = nodes_[i];
    if (n.feature == kLeaf) continue;
    if (n.feature < 0) throw Error(ErrorCode::kFormat, "negative split feature");
    // Children always follow their parent, which rules out cycles.
    if (n.left <= i || n.left >= count || n.right <= i || n.right >= count) {
      throw Error(ErrorCode::kFormat, fmt::format("node {} has invalid children", i));
    }
  }
  if (depth() > max_depth_) {
    throw Error(ErrorCode::kFormat,
                fmt::format("tree depth {} exceeds max_depth {}", depth(), max_depth_));
  }
}

int RegressionTree::depth() const {
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature != kLeaf) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

GbrModel::GbrModel(double init_value, double learning_rate, std::vector<RegressionTree> trees,
                   std::vector<std::string> feature_names)
    : init_value_(init_value),
      learning_rate_(learning_rate),
      trees_(std::move(trees)),
      feature_names_(std::move(feature_names)) {
  if (!(learning_rate_ > 0.0 && learning_rate_ <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must lie in (0, 1]");
  }
  const auto d = static_cast<std::int32_t>(feature_names_.size());
  for (const auto& tree : trees_) {
    for (const auto& node : tree.nodes()) {
      if (node.feature != RegressionTree::kLeaf && node.feature >= d) {
        throw Error(ErrorCode::kFormat,
                    fmt::format("split feature {} out of range for {} features", node.feature, d));
      }
    }
  }
}

double GbrModel::predict_staged(std::span<const double> x, std::size_t stages) const {
  stages = std::min(stages, trees_.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < stages; ++t) sum += trees_[t].predict(x);
  return init_value_ + learning_rate_ * sum;
}

double GbrModel::predict(std::span<const double> x) const {
  if (x.size() != feature_names_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("input has {} values, model expects {}", x.size(),
                            feature_names_.size()));
  }
  return predict_staged(x, trees_.size());
}

std::vector<double> GbrModel::predict_batch(const Matrix& rows) const {
  if (rows.empty()) return {};
  if (rows.cols() != feature_names_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("batch has {} columns, model expects {}", rows.cols(),
                            feature_names_.size()));
  }
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    out[i] = predict_staged(rows.row(i), trees_.size());
  }
  return out;
}

namespace {

double RunningMean(std::span<const double> values, std::span<const std::size_t> members) {
  double mean = 0.0;
  std::size_t k = 0;
  for (std::size_t i : members) {
    ++k;
    mean += (values[i] - mean) / static_cast<double>(k);
  }
  return mean;
}

struct Split {
  std::int32_t feature = RegressionTree::kLeaf;
  double threshold = 0.0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<std::vector<std::size_t>>& sorted_by_feature,
              std::span<const double> residual, const GbrParams& params)
      : x_(x), sorted_(sorted_by_feature), residual_(residual), params_(params),
        node_of_(x.rows(), 0) {}

  RegressionTree build() {
    std::vector<std::size_t> all(x_.rows());
    std::iota(all.begin(), all.end(), 0);
    grow(all, 0);
    return RegressionTree(std::move(nodes_), params_.max_depth);
  }

  // Leaf index reached by each training row; only valid after build().
  const std::vector<std::int32_t>& leaf_of() const { return leaf_of_; }

 private:
  std::int32_t grow(const std::vector<std::size_t>& members, int depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    const auto split = depth < params_.max_depth ? best_split(members, id) : Split{};
    if (split.feature == RegressionTree::kLeaf) {
      nodes_[id].value = RunningMean(residual_, members);
      if (leaf_of_.empty()) leaf_of_.assign(x_.rows(), -1);
      for (std::size_t i : members) leaf_of_[i] = id;
      return id;
    }
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : members) {
      (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& members, std::int32_t node) {
    const std::size_t n = members.size();
    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    if (n < 2 * min_leaf) return {};
    for (std::size_t i : members) node_of_[i] = node;

    double total = 0.0;
    for (std::size_t i : members) total += residual_[i];
    const double parent_score = total * total / static_cast<double>(n);

    Split best;
    best.score = parent_score;
    std::vector<std::size_t> ordered;
    ordered.reserve(n);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      ordered.clear();
      for (std::size_t i : sorted_[f]) {
        if (node_of_[i] == node) ordered.push_back(i);
      }
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_sum += residual_[ordered[k]];
        const std::size_t n_left = k + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf) continue;
        if (n_right < min_leaf) break;
        const double lo = x_(ordered[k], f);
        const double hi = x_(ordered[k + 1], f);
        if (lo == hi) continue;
        const double right_sum = total - left_sum;
        const double score = left_sum * left_sum / static_cast<double>(n_left) +
                             right_sum * right_sum / static_cast<double>(n_right);
        if (score > best.score) {
          double mid = lo + (hi - lo) / 2.0;
          if (mid >= hi) mid = lo;
          best = Split{static_cast<std::int32_t>(f), mid, score};
        }
      }
    }
    // Members are re-tagged by the children; leaving stale tags is harmless
    // because every lookup compares against the current node id.
    return best;
  }

  const Matrix& x_;
  const std::vector<std::vector<std::size_t>>& sorted_;
  std::span<const double> residual_;
  const GbrParams& params_;
  std::vector<std::int32_t> node_of_;
  std::vector<std::int32_t> leaf_of_;
  std::vector<RegressionTree::Node> nodes_;
};

}  // namespace

GbrModel FitGbr(const Dataset& train, const GbrParams& params, std::vector<double>* stage_loss) {
  if (train.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot fit on an empty dataset");
  if (params.n_trees < 0 || params.max_depth < 1 || params.min_samples_leaf < 1 ||
      !(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("degenerate boosting params: n_trees={} max_depth={} "
                            "learning_rate={} min_samples_leaf={}",
                            params.n_trees, params.max_depth, params.learning_rate,
                            params.min_samples_leaf));
  }
  const Matrix& x = train.rows();
  const auto& y = train.target();
  const std::size_t n = train.num_rows();

  std::vector<std::vector<std::size_t>> sorted(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = sorted[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  std::vector<std::size_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0);
  const double init = RunningMean(y, everyone);

  // Predictions are kept as init + lr * tree_sum so that training-time values
  // match GbrModel::predict bit for bit.
  std::vector<double> tree_sum(n, 0.0);
  std::vector<double> residual(n);
  auto current = [&](std::size_t i) { return init + params.learning_rate * tree_sum[i]; };
  auto record_loss = [&] {
    if (!stage_loss) return;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += (y[i] - current(i)) * (y[i] - current(i));
    stage_loss->push_back(sse / static_cast<double>(n));
  };
  if (stage_loss) stage_loss->clear();
  record_loss();

  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int stage = 0; stage < params.n_trees; ++stage) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - current(i);
    TreeBuilder builder(x, sorted, residual, params);
    RegressionTree tree = builder.build();
    const auto& leaf_of = builder.leaf_of();
    for (std::size_t i = 0; i < n; ++i) tree_sum[i] += tree.nodes()[leaf_of[i]].value;
    trees.push_back(std::move(tree));
    record_loss();
  }
  return GbrModel(init, params.learning_rate, std::move(trees), train.feature_names());
}

}  // namespace mcbrp
