#include "mcbrp/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "mcbrp/error.hpp"
#include "test_util.hpp"

namespace mcbrp {
namespace {

using testing::CodeOf;

TEST(LoadCsvTest, ExtractsTargetAndKeepsHeaderOrder) {
  const Dataset ds = ParseCsv("a,b,sales\n1,2,3\n4,5,6\n7,8,9\n", {"sales"});
  EXPECT_EQ(ds.feature_names(), (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(ds.num_rows(), 3u);
  EXPECT_EQ(ds.target(), (std::vector<double>{3, 6, 9}));
  EXPECT_EQ(ds.rows()(2, 1), 8.0);
  EXPECT_EQ(ds.row_ids(), (std::vector<RowId>{0, 1, 2}));
  EXPECT_EQ(ds.target_name(), "sales");
}

TEST(LoadCsvTest, DropRowPolicySkipsBlankCell) {
  const Dataset ds = ParseCsv("a,b,sales\n1,2,3\n4,,6\n7,8,9\n", {"sales", DropPolicy::kDropRow});
  ASSERT_EQ(ds.num_rows(), 2u);
  EXPECT_EQ(ds.row_ids(), (std::vector<RowId>{0, 2}));
  EXPECT_EQ(ds.target(), (std::vector<double>{3, 9}));
}

TEST(LoadCsvTest, RejectPolicyFailsOnNonNumericCell) {
  EXPECT_EQ(CodeOf([] { ParseCsv("a,sales\n1,2\nabc,3\n", {"sales", DropPolicy::kReject}); }),
            ErrorCode::kNonNumericCell);
  EXPECT_EQ(CodeOf([] { ParseCsv("a,sales\n1,2\nnan,3\n", {"sales", DropPolicy::kReject}); }),
            ErrorCode::kNonNumericCell);
}

TEST(LoadCsvTest, MissingTargetColumn) {
  EXPECT_EQ(CodeOf([] { ParseCsv("a,b,revenue\n1,2,3\n", {"sales"}); }), ErrorCode::kMissingColumn);
}

TEST(LoadCsvTest, EmptyAfterDrops) {
  EXPECT_EQ(CodeOf([] { ParseCsv("a,sales\n,1\nx,2\n", {"sales"}); }), ErrorCode::kEmptyDataset);
  EXPECT_EQ(CodeOf([] { ParseCsv("a,sales\n", {"sales"}); }), ErrorCode::kEmptyDataset);
}

TEST(LoadCsvTest, IdColumnAndCrLf) {
  CsvOptions options{"y", DropPolicy::kDropRow, std::string("id")};
  const Dataset ds = ParseCsv("id,x,y\r\n10,1.5,2\r\n42,-3e2,4\r\n", options);
  EXPECT_EQ(ds.row_ids(), (std::vector<RowId>{10, 42}));
  EXPECT_EQ(ds.feature_names(), (std::vector<std::string>{"x"}));
  EXPECT_EQ(ds.rows()(1, 0), -300.0);
  EXPECT_EQ(CodeOf([&] { ParseCsv("id,x,y\n1,1,1\n1,2,2\n", options); }), ErrorCode::kFormat);
}

TEST(LoadCsvTest, MissingFileIsIoError) {
  EXPECT_EQ(CodeOf([] { LoadCsv("/nonexistent/file.csv", {"y"}); }), ErrorCode::kIo);
}

TEST(DatasetTest, RejectsDuplicateNamesAndNonFinite) {
  EXPECT_EQ(CodeOf([] { ParseCsv("a,a,y\n1,2,3\n", {"y"}); }), ErrorCode::kFormat);
  Matrix m(1, 1, std::nan(""));
  EXPECT_EQ(CodeOf([&] { Dataset({"a"}, m, {1.0}, {0}); }), ErrorCode::kNonNumericCell);
  EXPECT_EQ(CodeOf([] { Dataset({"a"}, Matrix(2, 1), {1.0}, {0, 1}); }),
            ErrorCode::kDimensionMismatch);
}

// write -> load reproduces every field, including arbitrary doubles.
TEST(DatasetTest, CsvRoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1e3);
    Matrix x(20, 3);
    std::vector<double> t(20);
    std::vector<RowId> ids(20);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = normal(rng);
      t[i] = normal(rng) * 1e-7;
      ids[i] = static_cast<RowId>(3 * i + seed);
    }
    const Dataset original({"p", "q", "r"}, x, t, ids, "sales");
    const Dataset back = ParseCsv(FormatCsv(original), {"sales", DropPolicy::kReject, "id"});
    EXPECT_EQ(back, original);
  }
}

TEST(SplitTest, YearsSplitAtThreshold) {
  std::string csv = "year,x,sales\n";
  for (int y = 2010; y <= 2015; ++y) csv += std::to_string(y) + "," + std::to_string(y - 2000) + ",1\n";
  const Dataset ds = ParseCsv(csv, {"sales"});
  const SplitDataset split = SplitByColumnThreshold(ds, "year", 2014);
  EXPECT_EQ(split.train.num_rows(), 4u);
  EXPECT_EQ(split.test.num_rows(), 2u);
  EXPECT_EQ(split.train.feature_names(), (std::vector<std::string>{"x"}));
  EXPECT_EQ(split.train.rows().column(0), (std::vector<double>{10, 11, 12, 13}));
  EXPECT_EQ(split.test.rows().column(0), (std::vector<double>{14, 15}));

  const SplitDataset kept = SplitByColumnThreshold(ds, "year", 2014, true);
  EXPECT_EQ(kept.test.rows().column(0), (std::vector<double>{2014, 2015}));
}

TEST(SplitTest, DegeneratePartitionsAndMissingColumn) {
  const Dataset ds = ParseCsv("year,sales\n2010,1\n2011,2\n", {"sales"});
  EXPECT_EQ(CodeOf([&] { SplitByColumnThreshold(ds, "year", 2020); }), ErrorCode::kEmptyPartition);
  EXPECT_EQ(CodeOf([&] { SplitByColumnThreshold(ds, "year", 2000); }), ErrorCode::kEmptyPartition);
  EXPECT_EQ(CodeOf([&] { SplitByColumnThreshold(ds, "month", 1); }), ErrorCode::kMissingColumn);
}

TEST(SplitTest, IsAPartitionOfRowIds) {
  const SyntheticData data = GenerateSynthetic({4, 300, 0.1, 1.0, 2010, 2015}, 7);
  const SplitDataset split = SplitByColumnThreshold(data.dataset, "year", 2013);
  std::multiset<RowId> seen(split.train.row_ids().begin(), split.train.row_ids().end());
  seen.insert(split.test.row_ids().begin(), split.test.row_ids().end());
  EXPECT_EQ(seen.size(), 300u);
  EXPECT_EQ(std::set<RowId>(seen.begin(), seen.end()).size(), 300u);
  EXPECT_EQ(split.train.feature_names(), split.test.feature_names());
}

// Counts rows holding any feature at least 4 IQRs from that feature's median.
std::size_t CountFarRows(const Dataset& ds, std::size_t feature_count) {
  std::vector<double> median(feature_count), iqr(feature_count);
  for (std::size_t j = 0; j < feature_count; ++j) {
    const auto col = ds.rows().column(j);
    median[j] = testing::OracleQuantile(col, 0.5);
    iqr[j] = testing::OracleQuantile(col, 0.75) - testing::OracleQuantile(col, 0.25);
  }
  std::size_t far = 0;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < feature_count; ++j) {
      any = any || std::abs(ds.rows()(i, j) - median[j]) >= 4.0 * iqr[j];
    }
    far += any ? 1 : 0;
  }
  return far;
}

TEST(SyntheticTest, DeterministicInSpecAndSeed) {
  const SyntheticSpec spec{5, 500, 0.1, 1.0, 2010, 2015};
  const SyntheticData a = GenerateSynthetic(spec, 11);
  const SyntheticData b = GenerateSynthetic(spec, 11);
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_EQ(a.outlier_rows, b.outlier_rows);
  EXPECT_NE(GenerateSynthetic(spec, 12).dataset, a.dataset);
}

TEST(SyntheticTest, NoOutliersStayWithinFourIqr) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SyntheticData data = GenerateSynthetic({6, 1000, 0.0, 1.0, 2010, 2015}, seed);
    EXPECT_TRUE(data.outlier_rows.empty());
    EXPECT_EQ(CountFarRows(data.dataset, 6), 0u);
  }
}

TEST(SyntheticTest, FlaggedOutlierCountMatchesBruteForceScan) {
  const SyntheticData data = GenerateSynthetic({10, 5000, 0.05, 1.0, 2010, 2015}, 42);
  EXPECT_EQ(data.outlier_rows.size(), 250u);
  EXPECT_EQ(CountFarRows(data.dataset, 10), 250u);
  // Heaviest allowed contamination still separates cleanly.
  const SyntheticData heavy = GenerateSynthetic({3, 1000, 0.2, 1.0, 2010, 2015}, 3);
  EXPECT_EQ(heavy.outlier_rows.size(), 200u);
  EXPECT_EQ(CountFarRows(heavy.dataset, 3), 200u);
}

TEST(SyntheticTest, SchemaAndYears) {
  const SyntheticData data = GenerateSynthetic({3, 200, 0.0, 1.0, 2010, 2015}, 1);
  EXPECT_EQ(data.dataset.feature_names(), (std::vector<std::string>{"x0", "x1", "x2", "year"}));
  EXPECT_EQ(data.dataset.target_name(), "sales");
  for (double y : data.dataset.rows().column(3)) {
    EXPECT_GE(y, 2010);
    EXPECT_LE(y, 2015);
    EXPECT_EQ(y, std::floor(y));
  }
}

TEST(SyntheticTest, InvalidSpecs) {
  EXPECT_EQ(CodeOf([] { GenerateSynthetic({1, 500, 0.0, 1.0, 2010, 2015}, 0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { GenerateSynthetic({3, 99, 0.0, 1.0, 2010, 2015}, 0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { GenerateSynthetic({3, 500, 0.25, 1.0, 2010, 2015}, 0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { GenerateSynthetic({3, 500, -0.1, 1.0, 2010, 2015}, 0); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace mcbrp
