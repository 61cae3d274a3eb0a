#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mcbrp/ensemble.hpp"
#include "mcbrp/error.hpp"

namespace mcbrp {

namespace {

constexpr const char* kFormatName = "mcbrp-gbr";
constexpr int kFormatVersion = 1;

}  // namespace

// {
//   "format": "mcbrp-gbr", "version": 1,
//   "init_value": <double>, "learning_rate": <double>,
//   "feature_names": [<string>...],
//   "trees": [{"max_depth": <int>, "feature": [...], "threshold": [...],
//              "left": [...], "right": [...], "value": [...]}]
// }
// Node arrays are parallel; feature == -1 marks a leaf.
nlohmann::json GbrModel::to_json() const {
  nlohmann::json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["init_value"] = init_value_;
  doc["learning_rate"] = learning_rate_;
  doc["feature_names"] = feature_names_;
  auto& trees = doc["trees"] = nlohmann::json::array();
  for (const auto& tree : trees_) {
    nlohmann::json t;
    t["max_depth"] = tree.max_depth();
    std::vector<std::int32_t> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& node : tree.nodes()) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
    }
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["left"] = left;
    t["right"] = right;
    t["value"] = value;
    trees.push_back(std::move(t));
  }
  return doc;
}

GbrModel GbrModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormatName) {
      throw Error(ErrorCode::kFormat, "not a mcbrp-gbr model document");
    }
    const int version = doc.at("version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::kFormat, fmt::format("unsupported model version {}", version));
    }
    std::vector<RegressionTree> trees;
    for (const auto& t : doc.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<std::int32_t>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<std::int32_t>>();
      const auto right = t.at("right").get<std::vector<std::int32_t>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const std::size_t count = feature.size();
      if (threshold.size() != count || left.size() != count || right.size() != count ||
          value.size() != count) {
        throw Error(ErrorCode::kFormat, "tree node arrays differ in length");
      }
      std::vector<RegressionTree::Node> nodes(count);
      for (std::size_t i = 0; i < count; ++i) {
        nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
      }
      trees.emplace_back(std::move(nodes), t.at("max_depth").get<int>());
    }
    return GbrModel(doc.at("init_value").get<double>(), doc.at("learning_rate").get<double>(),
                    std::move(trees), doc.at("feature_names").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, fmt::format("malformed model document: {}", e.what()));
  }
}

void GbrModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << to_json().dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing '{}'", path.string()));
}

GbrModel GbrModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, fmt::format("'{}' is not JSON: {}", path.string(), e.what()));
  }
  return from_json(doc);
}

}  // namespace mcbrp
