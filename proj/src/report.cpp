#include "mcbrp/report.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "mcbrp/error.hpp"

namespace mcbrp {

namespace {

std::string Shortest(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::vector<double> Histogram(std::span<const Explanation> group, std::size_t n) {
  std::vector<double> counts(n + 1, 0.0);
  for (const auto& e : group) {
    if (e.rows.size() != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("explanation {} has {} features, expected {}", e.instance_id,
                              e.rows.size(), n));
    }
    counts[e.out_of_range_count()] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(group.size());
  return counts;
}

}  // namespace

OutOfRangeStats ComputeOutOfRangeStats(std::span<const Explanation> large,
                                       std::span<const Explanation> reasonable) {
  if (large.empty() || reasonable.empty()) {
    throw Error(ErrorCode::kEmptyPartition, "out-of-range stats need both groups non-empty");
  }
  OutOfRangeStats stats;
  stats.n = large.front().rows.size();
  stats.histogram_large = Histogram(large, stats.n);
  stats.histogram_reasonable = Histogram(reasonable, stats.n);
  stats.all_out_fraction_large = stats.histogram_large.back();
  stats.all_out_fraction_reasonable = stats.histogram_reasonable.back();
  stats.count_large = large.size();
  stats.count_reasonable = reasonable.size();
  return stats;
}

nlohmann::json ToJson(const OutOfRangeStats& stats) {
  nlohmann::json doc;
  doc["n"] = stats.n;
  doc["count_large"] = stats.count_large;
  doc["count_reasonable"] = stats.count_reasonable;
  doc["histogram_large"] = stats.histogram_large;
  doc["histogram_reasonable"] = stats.histogram_reasonable;
  doc["all_out_fraction_large"] = stats.all_out_fraction_large;
  doc["all_out_fraction_reasonable"] = stats.all_out_fraction_reasonable;
  return doc;
}

RunSummary MakeRunSummary(const Predictor& model, const SplitDataset& split,
                          const ErrorTaxonomy& taxonomy) {
  if (taxonomy.size() != split.test.num_rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "taxonomy was not computed on the test split");
  }
  RunSummary s;
  s.r_squared = RSquared(model, split.test);
  s.epsilon_large = taxonomy.epsilon_large;
  s.train_rows = split.train.num_rows();
  s.test_rows = split.test.num_rows();
  s.large_count = taxonomy.large_ids.size();
  s.reasonable_count = taxonomy.reasonable_ids.size();
  s.large_error_fraction =
      static_cast<double>(s.large_count) / static_cast<double>(s.large_count + s.reasonable_count);
  return s;
}

nlohmann::json ToJson(const RunSummary& s) {
  nlohmann::json doc;
  doc["r_squared"] = s.r_squared;
  doc["large_error_fraction"] = s.large_error_fraction;
  doc["epsilon_large"] = s.epsilon_large;
  doc["train_rows"] = s.train_rows;
  doc["test_rows"] = s.test_rows;
  doc["large_count"] = s.large_count;
  doc["reasonable_count"] = s.reasonable_count;
  return doc;
}

ErrorTaxonomy WritePredictionDump(const Predictor& model, const Dataset& test,
                                  const std::filesystem::path& path) {
  if (test.empty()) throw Error(ErrorCode::kEmptyDataset, "prediction dump of an empty test set");
  const auto predicted = model.predict_batch(test.rows());
  ErrorTaxonomy taxonomy = ClassifyErrors(test.target(), predicted, test.row_ids());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << "row_id,actual,predicted,error,is_large\n";
  for (std::size_t i = 0; i < test.num_rows(); ++i) {
    out << test.row_ids()[i] << ',' << Shortest(test.target()[i]) << ',' << Shortest(predicted[i])
        << ',' << Shortest(taxonomy.errors[i]) << ',' << (taxonomy.is_large[i] ? 1 : 0) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing '{}'", path.string()));
  return taxonomy;
}

std::string FormatRankFrequency(std::span<const FeatureFrequency> large,
                                std::span<const FeatureFrequency> reasonable) {
  std::string out = "group,feature,fraction,share\n";
  for (const auto& f : large) {
    out += fmt::format("large,{},{},{}\n", f.feature, Shortest(f.fraction), Shortest(f.share));
  }
  for (const auto& f : reasonable) {
    out += fmt::format("reasonable,{},{},{}\n", f.feature, Shortest(f.fraction), Shortest(f.share));
  }
  return out;
}

}  // namespace mcbrp
