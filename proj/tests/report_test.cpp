#include "mcbrp/report.hpp"

#include <gtest/gtest.h>

#include <random>

#include "mcbrp/dataset.hpp"
#include "test_util.hpp"

namespace mcbrp {
namespace {

using testing::CodeOf;

Explanation WithFlags(std::vector<bool> flags) {
  Explanation e;
  e.explainable = true;
  e.ranking.n = flags.size();
  for (bool out : flags) {
    ExplanationRow row;
    row.out_of_range = out;
    e.rows.push_back(row);
  }
  return e;
}

double Total(const std::vector<double>& h) {
  double s = 0.0;
  for (double v : h) s += v;
  return s;
}

TEST(OutOfRangeStatsTest, HistogramsAreDistributions) {
  std::mt19937_64 rng(3);
  std::vector<Explanation> large, reasonable;
  for (int i = 0; i < 37; ++i) {
    std::vector<bool> flags(5);
    for (std::size_t k = 0; k < 5; ++k) flags[k] = rng() % 3 == 0;
    (i % 4 == 0 ? large : reasonable).push_back(WithFlags(flags));
  }
  const auto stats = ComputeOutOfRangeStats(large, reasonable);
  EXPECT_EQ(stats.n, 5u);
  ASSERT_EQ(stats.histogram_large.size(), 6u);
  ASSERT_EQ(stats.histogram_reasonable.size(), 6u);
  EXPECT_NEAR(Total(stats.histogram_large), 1.0, 1e-12);
  EXPECT_NEAR(Total(stats.histogram_reasonable), 1.0, 1e-12);
  EXPECT_EQ(stats.all_out_fraction_large, stats.histogram_large[5]);
  EXPECT_EQ(stats.count_large, large.size());
  EXPECT_EQ(stats.count_reasonable, reasonable.size());
}

TEST(OutOfRangeStatsTest, HandCases) {
  const std::vector<Explanation> all_out(3, WithFlags({true, true, true, true, true}));
  const std::vector<Explanation> two_out{WithFlags({true, false, true, false, false})};
  const auto stats = ComputeOutOfRangeStats(all_out, two_out);
  EXPECT_EQ(stats.all_out_fraction_large, 1.0);
  EXPECT_EQ(stats.histogram_reasonable, (std::vector<double>{0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(stats.all_out_fraction_reasonable, 0.0);

  const auto swapped = ComputeOutOfRangeStats(two_out, all_out);
  EXPECT_EQ(swapped.histogram_large, stats.histogram_reasonable);
  EXPECT_EQ(swapped.histogram_reasonable, stats.histogram_large);
}

TEST(OutOfRangeStatsTest, Errors) {
  const std::vector<Explanation> five{WithFlags({true, false, true, false, false})};
  const std::vector<Explanation> three{WithFlags({true, false, true})};
  EXPECT_EQ(CodeOf([&] { ComputeOutOfRangeStats(five, three); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { ComputeOutOfRangeStats({}, five); }), ErrorCode::kEmptyPartition);
  EXPECT_EQ(CodeOf([&] { ComputeOutOfRangeStats(five, {}); }), ErrorCode::kEmptyPartition);
}

// Model f = x0 against a target with small noise and `bumped` rows off by 100.
SplitDataset NoisySplit(std::size_t bumped, double noise_sd) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, noise_sd);
  const Dataset base = testing::UniformDataset(100, 2, 10.0, 6, [](auto x) { return x[0]; });
  std::vector<double> target = base.target();
  for (std::size_t i = 0; i < target.size(); ++i) target[i] += noise(rng) + (i < bumped ? 100.0 : 0.0);
  Dataset test(base.feature_names(), base.rows(), target, base.row_ids());
  return {base, test};
}

TEST(RunSummaryTest, LargeErrorFraction) {
  const FunctionPredictor f(2, [](std::span<const double> x) { return x[0]; });
  const SplitDataset split = NoisySplit(4, 0.1);
  const auto taxonomy = ClassifyErrors(split.test.target(), f.predict_batch(split.test.rows()));
  const RunSummary s = MakeRunSummary(f, split, taxonomy);
  EXPECT_EQ(s.large_count, 4u);
  EXPECT_DOUBLE_EQ(s.large_error_fraction, 0.04);
  EXPECT_EQ(s.reasonable_count, 96u);
  EXPECT_EQ(s.test_rows, 100u);

  const SplitDataset clean = NoisySplit(0, 0.0);
  const auto none = ClassifyErrors(clean.test.target(), f.predict_batch(clean.test.rows()));
  const RunSummary z = MakeRunSummary(f, clean, none);
  EXPECT_EQ(z.large_count, 0u);
  EXPECT_EQ(z.large_error_fraction, 0.0);
  EXPECT_EQ(ToJson(z)["large_error_fraction"], 0.0);
}

TEST(PredictionDumpTest, RoundTripsTaxonomy) {
  const FunctionPredictor f(2, [](std::span<const double> x) { return x[0]; });
  const SplitDataset split = NoisySplit(6, 1.0);
  const auto path = testing::FreshDir("dump") / "predictions.csv";
  const ErrorTaxonomy taxonomy = WritePredictionDump(f, split.test, path);

  const Dataset dump = LoadCsv(path, {.target_column = "actual", .drop_policy = DropPolicy::kReject,
                                      .id_column = "row_id"});
  ASSERT_EQ(dump.num_rows(), split.test.num_rows());
  const auto predicted = dump.rows().column(*dump.feature_index("predicted"));
  const auto is_large = dump.rows().column(*dump.feature_index("is_large"));
  const auto reread = ClassifyErrors(dump.target(), predicted, dump.row_ids());
  EXPECT_DOUBLE_EQ(reread.epsilon_large, taxonomy.epsilon_large);
  EXPECT_EQ(reread.large_ids, taxonomy.large_ids);
  for (std::size_t i = 0; i < is_large.size(); ++i) {
    EXPECT_EQ(is_large[i] == 1.0, static_cast<bool>(taxonomy.is_large[i]));
  }
  EXPECT_EQ(taxonomy.large_ids.size(), 6u);
}

TEST(RankFrequencyFormatTest, Layout) {
  const std::vector<FeatureFrequency> large{{"a", 1.0, 0.5}, {"b", 0.5, 0.25}};
  const std::vector<FeatureFrequency> reasonable{{"b", 0.75, 0.75}};
  const std::string csv = FormatRankFrequency(large, reasonable);
  EXPECT_EQ(csv,
            "group,feature,fraction,share\n"
            "large,a,1,0.5\n"
            "large,b,0.5,0.25\n"
            "reasonable,b,0.75,0.75\n");
}

}  // namespace
}  // namespace mcbrp
