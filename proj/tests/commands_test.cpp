#include "mcbrp/commands.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "test_util.hpp"

namespace mcbrp {
namespace {

namespace fs = std::filesystem;
using testing::CodeOf;
using testing::ReadFile;

RunConfig SmallConfig(const std::string& name) {
  RunConfig c;
  c.output_dir = testing::FreshDir(name).string();
  c.num_rows = 1000;
  c.num_features = 4;
  c.n_trees = 30;
  c.n = 3;
  c.m = 800;
  c.num_samples = 400;
  c.max_reasonable = 30;
  return c;
}

TEST(GenDataTest, DeterministicAndCountsOutliers) {
  RunConfig c = SmallConfig("gen");
  std::ostringstream log;
  const GenDataResult a = CmdGenData(c, log);
  const std::string first = ReadFile(a.path);
  const GenDataResult b = CmdGenData(c, log);
  EXPECT_EQ(first, ReadFile(b.path));
  EXPECT_EQ(a.rows, 1000u);
  EXPECT_EQ(a.outlier_rows, 50u);
  EXPECT_NE(log.str().find("50 outlier rows"), std::string::npos);
  c.seed = 43;
  EXPECT_NE(first, ReadFile(CmdGenData(c, log).path));
}

TEST(GenDataTest, MissingOutputDirectory) {
  RunConfig c = SmallConfig("nodir");
  c.output_dir = (fs::path(c.output_dir) / "absent" / "deeper").string();
  c.create_output_dir = false;
  std::ostringstream log;
  EXPECT_EQ(CodeOf([&] { CmdGenData(c, log); }), ErrorCode::kIo);
  c.create_output_dir = true;
  EXPECT_TRUE(fs::exists(CmdGenData(c, log).path));
}

TEST(TrainTest, WritesModelAndSummaryDeterministically) {
  const RunConfig c = SmallConfig("train");
  std::ostringstream log;
  CmdGenData(c, log);
  const RunSummary s = CmdTrain(c, log);
  const std::string model = ReadFile(fs::path(c.output_dir) / kModelFile);
  const auto summary = nlohmann::json::parse(ReadFile(fs::path(c.output_dir) / kSummaryFile));
  EXPECT_GT(s.r_squared, 0.8);
  EXPECT_EQ(summary["large_count"], s.large_count);
  EXPECT_EQ(s.large_count + s.reasonable_count, s.test_rows);
  CmdTrain(c, log);
  EXPECT_EQ(model, ReadFile(fs::path(c.output_dir) / kModelFile));
}

TEST(TrainTest, ConstantTargetIsRejected) {
  RunConfig c = SmallConfig("constant");
  std::ofstream(fs::path(c.output_dir) / "data.csv") << "id,x0,year,sales\n"
                                                     << "0,1,2012,5\n1,2,2013,5\n2,3,2014,5\n3,4,2015,5\n";
  std::ostringstream log;
  EXPECT_EQ(CodeOf([&] { CmdTrain(c, log); }), ErrorCode::kZeroVariance);
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = SmallConfig("pipeline");
    std::ostringstream log;
    CmdGenData(config_, log);
    summary_ = CmdTrain(config_, log);
  }
  static RunConfig config_;
  static RunSummary summary_;
};
RunConfig PipelineTest::config_;
RunSummary PipelineTest::summary_;

TEST_F(PipelineTest, ExplainAllLargeWritesOneFilePerInstance) {
  std::ostringstream log;
  const auto written = CmdExplain(config_, {.all_large = true}, log);
  EXPECT_EQ(written.size(), summary_.large_count);
  for (const auto& path : written) {
    const auto doc = nlohmann::json::parse(ReadFile(path));
    EXPECT_TRUE(doc["is_large"].get<bool>());
    EXPECT_TRUE(fs::exists(fs::path(path).replace_extension(".txt")));
  }
}

TEST_F(PipelineTest, ReasonableRowNeedsForce) {
  std::ostringstream log;
  // The prediction dump comes from report.
  CmdReport(config_, log);
  const Dataset preds = LoadCsv(fs::path(config_.output_dir) / kPredictionsFile,
                                {.target_column = "actual", .id_column = "row_id"});
  const auto is_large = preds.rows().column(*preds.feature_index("is_large"));
  std::optional<RowId> reasonable;
  for (std::size_t i = 0; i < is_large.size() && !reasonable; ++i) {
    if (is_large[i] == 0.0) reasonable = preds.row_ids()[i];
  }
  ASSERT_TRUE(reasonable.has_value());
  EXPECT_EQ(CodeOf([&] { CmdExplain(config_, {.row = reasonable}, log); }), ErrorCode::kNotLargeError);
  const auto written = CmdExplain(config_, {.row = reasonable, .force = true}, log);
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(written[0], ExplanationPath(config_, *reasonable));
  EXPECT_EQ(CodeOf([&] { CmdExplain(config_, {}, log); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { CmdExplain(config_, {.row = -5}, log); }), ErrorCode::kInvalidArgument);
}

TEST_F(PipelineTest, ReportIsReproducibleAcrossWorkerCounts) {
  std::ostringstream log;
  const fs::path out(config_.output_dir);
  const ReportResult first = CmdReport(config_, log);
  ASSERT_TRUE(first.stats.has_value());
  const std::string ranges = ReadFile(out / kOutOfRangeFile);
  const std::string ranks = ReadFile(out / kRankFrequencyFile);
  const std::string preds = ReadFile(out / kPredictionsFile);
  RunConfig wide = config_;
  wide.workers = 3;
  CmdReport(wide, log);
  EXPECT_EQ(ranges, ReadFile(out / kOutOfRangeFile));
  EXPECT_EQ(ranks, ReadFile(out / kRankFrequencyFile));
  EXPECT_EQ(preds, ReadFile(out / kPredictionsFile));
  const auto doc = nlohmann::json::parse(ranges);
  EXPECT_EQ(doc["count_reasonable"].get<std::size_t>() + doc["unexplainable_reasonable"].get<std::size_t>(),
            config_.max_reasonable);
}

TEST(ReportTest, NoLargeErrorsWritesNote) {
  RunConfig c = SmallConfig("no_large");
  c.n = 2;
  {
    std::ofstream out(fs::path(c.output_dir) / "data.csv");
    out << "id,x0,x1,year,sales\n";
    for (int i = 0; i < 400; ++i) {
      const int x0 = i % 2;
      out << i << ',' << x0 << ',' << (i % 7) << ',' << 2010 + (i % 6) << ',' << 5 * x0 << '\n';
    }
  }
  std::ostringstream log;
  const RunSummary s = CmdTrain(c, log);
  EXPECT_EQ(s.large_count, 0u);
  const ReportResult r = CmdReport(c, log);
  EXPECT_FALSE(r.stats.has_value());
  const auto doc = nlohmann::json::parse(ReadFile(fs::path(c.output_dir) / kOutOfRangeFile));
  EXPECT_TRUE(doc.contains("note"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / kRankFrequencyFile));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / kPredictionsFile));
}

}  // namespace
}  // namespace mcbrp
