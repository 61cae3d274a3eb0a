#ifndef MCBRP_DATASET_HPP_
#define MCBRP_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcbrp/matrix.hpp"

namespace mcbrp {

using RowId = std::int64_t;

// Numeric feature matrix plus target. Immutable once constructed; the
// constructor enforces the shape, finiteness and naming invariants.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, Matrix rows,
          std::vector<double> target, std::vector<RowId> row_ids,
          std::string target_name = "target");

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const Matrix& rows() const noexcept { return rows_; }
  const std::vector<double>& target() const noexcept { return target_; }
  const std::vector<RowId>& row_ids() const noexcept { return row_ids_; }
  const std::string& target_name() const noexcept { return target_name_; }

  std::size_t num_rows() const noexcept { return rows_.rows(); }
  std::size_t num_features() const noexcept { return feature_names_.size(); }
  bool empty() const noexcept { return num_rows() == 0; }

  std::span<const double> row(std::size_t i) const { return rows_.row(i); }

  std::optional<std::size_t> feature_index(const std::string& name) const;
  // Position of a row id in load order.
  std::optional<std::size_t> position_of(RowId id) const;

  Dataset subset(std::span<const std::size_t> positions) const;
  Dataset without_feature(std::size_t feature) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::string> feature_names_;
  Matrix rows_;
  std::vector<double> target_;
  std::vector<RowId> row_ids_;
  std::string target_name_ = "target";
};

struct SplitDataset {
  Dataset train;
  Dataset test;
};

enum class DropPolicy { kReject, kDropRow };

DropPolicy ParseDropPolicy(const std::string& text);

struct CsvOptions {
  std::string target_column;
  DropPolicy drop_policy = DropPolicy::kDropRow;
  // When set, this column supplies row ids instead of the 0-based data-line
  // index.
  std::optional<std::string> id_column;
};

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options);
Dataset ParseCsv(const std::string& text, const CsvOptions& options);

// Writes `id,<features...>,<target>` with shortest round-trip number formatting.
void WriteCsv(const Dataset& dataset, const std::filesystem::path& path,
              const std::string& id_column = "id");
std::string FormatCsv(const Dataset& dataset, const std::string& id_column = "id");

// Train gets rows with column < threshold, test the rest. The split column is
// dropped from both sides unless keep_column is set.
SplitDataset SplitByColumnThreshold(const Dataset& dataset, const std::string& column,
                                    double threshold, bool keep_column = false);

struct SyntheticSpec {
  std::size_t num_features = 10;
  std::size_t num_rows = 5000;
  double outlier_fraction = 0.05;
  double noise_sd = 1.0;
  int first_year = 2010;
  int last_year = 2015;
};

struct SyntheticData {
  Dataset dataset;
  // Row ids that received out-of-distribution feature values, ascending.
  std::vector<RowId> outlier_rows;
};

// Deterministic in (spec, seed). Features are x0..x{d-1} plus an integer
// `year` column; the target column is named `sales`.
SyntheticData GenerateSynthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace mcbrp

#endif  // MCBRP_DATASET_HPP_
