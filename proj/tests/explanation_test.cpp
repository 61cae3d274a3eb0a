#include "mcbrp/explanation.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace mcbrp {
namespace {

using testing::CodeOf;

double Sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

// Target is the sum of the features plus noise. Rows 0..9 have x0 replaced
// by 40 after the target was computed, row 10 has a target 1000 too high.
struct Fixture {
  Dataset test;
  FunctionPredictor model{3, Sum};
  ErrorTaxonomy taxonomy;
  std::vector<FeatureFences> fences;

  Fixture() {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 1.0);
    const Dataset base = testing::UniformDataset(300, 3, 10.0, 2, Sum);
    Matrix rows = base.rows();
    std::vector<double> target = base.target();
    for (std::size_t i = 0; i < rows.rows(); ++i) target[i] += noise(rng);
    for (std::size_t i = 0; i < 10; ++i) rows(i, 0) = 40.0;
    target[10] += 1000.0;
    test = Dataset(base.feature_names(), rows, target, base.row_ids());
    taxonomy = ClassifyErrors(test.target(), model.predict_batch(test.rows()), test.row_ids());
    fences = ComputeAllFeatureFences(test, taxonomy);
  }

  ExplainParams Params(std::uint64_t seed = 1) const {
    ExplainParams p;
    p.n = 3;
    p.m = 4000;
    p.seed = seed;
    p.surrogate.num_samples = 600;
    return p;
  }
};

TEST(ExplainTest, CorruptedFeatureIsOutOfRange) {
  const Fixture fx;
  ASSERT_TRUE(fx.taxonomy.is_large[0]);
  const Explanation e = ExplainInstance(fx.model, fx.test, 0, fx.taxonomy, fx.fences, fx.Params());
  EXPECT_TRUE(e.is_large);
  EXPECT_TRUE(e.explainable);
  EXPECT_EQ(e.rows.size(), 3u);
  const auto row = std::find_if(e.rows.begin(), e.rows.end(), [](const auto& r) { return r.feature == 0; });
  ASSERT_NE(row, e.rows.end());
  EXPECT_EQ(row->status, RowStatus::kOk);
  ASSERT_TRUE(row->range.has_value());
  EXPECT_TRUE(row->out_of_range);
  EXPECT_EQ(row->value, 40.0);
  EXPECT_LT(row->range->high, 40.0);
  ASSERT_TRUE(row->trend.has_value());
  EXPECT_GT(*row->trend, 0.9);
  EXPECT_EQ(row->trend_text, "As input increases, prediction increases");
  EXPECT_GE(row->stratum_size, 30u);
  EXPECT_GE(e.out_of_range_count(), 1u);
}

TEST(ExplainTest, MonotoneModelGivesPositiveTrends) {
  const Fixture fx;
  for (std::size_t pos = 0; pos < 10; ++pos) {
    const Explanation e = ExplainInstance(fx.model, fx.test, pos, fx.taxonomy, fx.fences, fx.Params());
    for (const auto& row : e.rows) {
      if (row.trend) EXPECT_GT(*row.trend, 0.0);
      if (!row.range) EXPECT_FALSE(row.out_of_range);
    }
  }
}

TEST(ExplainTest, SameSeedSameOutput) {
  const Fixture fx;
  const auto a = ToJson(ExplainInstance(fx.model, fx.test, 3, fx.taxonomy, fx.fences, fx.Params(5)));
  const auto b = ToJson(ExplainInstance(fx.model, fx.test, 3, fx.taxonomy, fx.fences, fx.Params(5)));
  EXPECT_EQ(a.dump(), b.dump());
  auto wide = fx.Params(5);
  wide.workers = 4;
  const auto c = ToJson(ExplainInstance(fx.model, fx.test, 3, fx.taxonomy, fx.fences, wide));
  EXPECT_EQ(a.dump(), c.dump());
}

TEST(ExplainTest, UnreachableTargetIsInsufficientEvidence) {
  const Fixture fx;
  ASSERT_TRUE(fx.taxonomy.is_large[10]);
  const Explanation e = ExplainInstance(fx.model, fx.test, 10, fx.taxonomy, fx.fences, fx.Params());
  EXPECT_FALSE(e.explainable);
  for (const auto& row : e.rows) {
    EXPECT_EQ(row.status, RowStatus::kInsufficientEvidence);
    EXPECT_FALSE(row.range.has_value());
    EXPECT_FALSE(row.out_of_range);
  }
  EXPECT_EQ(ToJson(e)["status"], "insufficient-evidence");
  EXPECT_EQ(CodeOf([&] { Explain(fx.model, fx.test, 10, fx.taxonomy, fx.Params()); }),
            ErrorCode::kInsufficientEvidence);
}

TEST(ExplainTest, ReasonableRowNeedsForce) {
  const Fixture fx;
  ASSERT_FALSE(fx.taxonomy.is_large[50]);
  EXPECT_EQ(CodeOf([&] { ExplainInstance(fx.model, fx.test, 50, fx.taxonomy, fx.fences, fx.Params()); }),
            ErrorCode::kNotLargeError);
  auto p = fx.Params();
  p.force = true;
  const Explanation e = ExplainInstance(fx.model, fx.test, 50, fx.taxonomy, fx.fences, p);
  EXPECT_FALSE(e.is_large);
  EXPECT_TRUE(e.explainable);
}

TEST(ExplainTest, JsonAndTableLayout) {
  const Fixture fx;
  const Explanation e = Explain(fx.model, fx.test, 0, fx.taxonomy, fx.Params());
  const auto json = ToJson(e);
  EXPECT_EQ(json["instance_id"], 0);
  EXPECT_EQ(json["status"], "explained");
  EXPECT_EQ(json["rows"].size(), 3u);
  for (const char* key : {"feature", "feature_index", "importance", "value", "reasonable_low",
                          "reasonable_high", "trend", "trend_text", "out_of_range", "stratum_size",
                          "status"}) {
    EXPECT_TRUE(json["rows"][0].contains(key)) << key;
  }
  const std::string table = RenderTable(e);
  for (const char* header : {"Input", "Definition", "Trend", "Value", "Reasonable range"}) {
    EXPECT_NE(table.find(header), std::string::npos) << header;
  }
  EXPECT_NE(table.find("40.00"), std::string::npos);
}

TEST(TrendTextTest, Phrases) {
  EXPECT_EQ(TrendText(0.5), "As input increases, prediction increases");
  EXPECT_EQ(TrendText(-0.5), "As input increases, prediction decreases");
  EXPECT_EQ(TrendText(std::nullopt), "No detectable trend");
}

}  // namespace
}  // namespace mcbrp
