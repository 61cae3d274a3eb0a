#include "mcbrp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "mcbrp/error.hpp"

namespace mcbrp {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMissingColumn: return "missing-column";
    case ErrorCode::kNonNumericCell: return "non-numeric-cell";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kEmptyPartition: return "empty-partition";
    case ErrorCode::kZeroVariance: return "zero-variance";
    case ErrorCode::kInsufficientEvidence: return "insufficient-evidence";
    case ErrorCode::kNotLargeError: return "not-large-error";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

void Matrix::push_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("row has {} values, matrix has {} columns", values.size(), cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Dataset::Dataset(std::vector<std::string> feature_names, Matrix rows,
                 std::vector<double> target, std::vector<RowId> row_ids,
                 std::string target_name)
    : feature_names_(std::move(feature_names)),
      rows_(std::move(rows)),
      target_(std::move(target)),
      row_ids_(std::move(row_ids)),
      target_name_(std::move(target_name)) {
  if (rows_.rows() != target_.size() || rows_.rows() != row_ids_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("dataset has {} rows, {} targets and {} row ids", rows_.rows(),
                            target_.size(), row_ids_.size()));
  }
  if (rows_.rows() > 0 && rows_.cols() != feature_names_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("dataset has {} columns but {} feature names", rows_.cols(),
                            feature_names_.size()));
  }
  if (rows_.rows() == 0) rows_ = Matrix(0, feature_names_.size());
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names_) {
    if (name.empty()) throw Error(ErrorCode::kFormat, "empty feature name");
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kFormat, fmt::format("duplicate feature name '{}'", name));
    }
  }
  for (double v : rows_.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonNumericCell, "non-finite feature value");
  }
  for (double v : target_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonNumericCell, "non-finite target value");
  }
}

std::optional<std::size_t> Dataset::feature_index(const std::string& name) const {
  auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names_.begin());
}

std::optional<std::size_t> Dataset::position_of(RowId id) const {
  auto it = std::find(row_ids_.begin(), row_ids_.end(), id);
  if (it == row_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - row_ids_.begin());
}

Dataset Dataset::subset(std::span<const std::size_t> positions) const {
  Matrix rows(0, num_features());
  std::vector<double> target;
  std::vector<RowId> ids;
  target.reserve(positions.size());
  ids.reserve(positions.size());
  for (std::size_t p : positions) {
    rows.push_row(row(p));
    target.push_back(target_[p]);
    ids.push_back(row_ids_[p]);
  }
  return Dataset(feature_names_, std::move(rows), std::move(target), std::move(ids),
                 target_name_);
}

Dataset Dataset::without_feature(std::size_t feature) const {
  std::vector<std::string> names = feature_names_;
  names.erase(names.begin() + static_cast<std::ptrdiff_t>(feature));
  Matrix rows(0, names.size());
  std::vector<double> buffer;
  for (std::size_t i = 0; i < num_rows(); ++i) {
    auto r = row(i);
    buffer.assign(r.begin(), r.end());
    buffer.erase(buffer.begin() + static_cast<std::ptrdiff_t>(feature));
    rows.push_row(buffer);
  }
  return Dataset(std::move(names), std::move(rows), target_, row_ids_, target_name_);
}

DropPolicy ParseDropPolicy(const std::string& text) {
  if (text == "reject") return DropPolicy::kReject;
  if (text == "drop-row") return DropPolicy::kDropRow;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown drop policy '{}' (expected reject or drop-row)", text));
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      break;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> ParseNumber(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string FormatNumber(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

Dataset ParseCsv(const std::string& text, const CsvOptions& options) {
  std::vector<std::string_view> lines;
  {
    std::string_view all(text);
    std::size_t start = 0;
    while (start <= all.size()) {
      std::size_t nl = all.find('\n', start);
      if (nl == std::string_view::npos) nl = all.size();
      lines.push_back(all.substr(start, nl - start));
      start = nl + 1;
    }
  }
  while (!lines.empty() && Trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::kFormat, "CSV has no header row");

  std::string_view header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const auto header = SplitFields(header_line);

  std::optional<std::size_t> target_col;
  std::optional<std::size_t> id_col;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(header[c]);
    if (name == options.target_column) {
      target_col = c;
    } else if (options.id_column && name == *options.id_column) {
      id_col = c;
    } else {
      feature_cols.push_back(c);
      feature_names.push_back(name);
    }
  }
  if (!target_col) {
    throw Error(ErrorCode::kMissingColumn,
                fmt::format("target column '{}' not found in header", options.target_column));
  }
  if (options.id_column && !id_col) {
    throw Error(ErrorCode::kMissingColumn,
                fmt::format("id column '{}' not found in header", *options.id_column));
  }

  Matrix rows(0, feature_cols.size());
  std::vector<double> target;
  std::vector<RowId> ids;
  std::vector<double> buffer(feature_cols.size());
  std::set<RowId> seen_ids;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const RowId data_index = static_cast<RowId>(li - 1);
    const std::size_t line_number = li + 1;
    const auto fields = SplitFields(lines[li]);
    auto reject_or_skip = [&](const std::string& why) {
      if (options.drop_policy == DropPolicy::kReject) {
        throw Error(ErrorCode::kNonNumericCell, fmt::format("line {}: {}", line_number, why));
      }
    };
    if (fields.size() != header.size()) {
      reject_or_skip(fmt::format("expected {} fields, found {}", header.size(), fields.size()));
      continue;
    }
    bool ok = true;
    for (std::size_t k = 0; k < feature_cols.size() && ok; ++k) {
      auto v = ParseNumber(fields[feature_cols[k]]);
      if (!v) {
        reject_or_skip(fmt::format("column '{}' holds non-numeric value '{}'", feature_names[k],
                                   fields[feature_cols[k]]));
        ok = false;
      } else {
        buffer[k] = *v;
      }
    }
    if (!ok) continue;
    auto t = ParseNumber(fields[*target_col]);
    if (!t) {
      reject_or_skip(fmt::format("target holds non-numeric value '{}'", fields[*target_col]));
      continue;
    }
    RowId id = data_index;
    if (id_col) {
      auto v = ParseNumber(fields[*id_col]);
      if (!v || *v != std::floor(*v)) {
        reject_or_skip(fmt::format("id '{}' is not an integer", fields[*id_col]));
        continue;
      }
      id = static_cast<RowId>(*v);
      if (!seen_ids.insert(id).second) {
        throw Error(ErrorCode::kFormat, fmt::format("line {}: duplicate row id {}", line_number, id));
      }
    }
    rows.push_row(buffer);
    target.push_back(*t);
    ids.push_back(id);
  }
  if (target.empty()) throw Error(ErrorCode::kEmptyDataset, "no usable rows in CSV");
  return Dataset(std::move(feature_names), std::move(rows), std::move(target), std::move(ids),
                 options.target_column);
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseCsv(ss.str(), options);
}

std::string FormatCsv(const Dataset& dataset, const std::string& id_column) {
  std::string out = id_column;
  for (const auto& name : dataset.feature_names()) {
    out += ',';
    out += name;
  }
  out += ',';
  out += dataset.target_name();
  out += '\n';
  for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
    out += std::to_string(dataset.row_ids()[i]);
    for (double v : dataset.row(i)) {
      out += ',';
      out += FormatNumber(v);
    }
    out += ',';
    out += FormatNumber(dataset.target()[i]);
    out += '\n';
  }
  return out;
}

void WriteCsv(const Dataset& dataset, const std::filesystem::path& path,
              const std::string& id_column) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << FormatCsv(dataset, id_column);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing '{}'", path.string()));
}

SplitDataset SplitByColumnThreshold(const Dataset& dataset, const std::string& column,
                                    double threshold, bool keep_column) {
  auto col = dataset.feature_index(column);
  if (!col) {
    throw Error(ErrorCode::kMissingColumn, fmt::format("split column '{}' not found", column));
  }
  std::vector<std::size_t> train_pos;
  std::vector<std::size_t> test_pos;
  for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
    (dataset.rows()(i, *col) < threshold ? train_pos : test_pos).push_back(i);
  }
  if (train_pos.empty()) {
    throw Error(ErrorCode::kEmptyPartition,
                fmt::format("no rows with {} < {}: training side is empty", column, threshold));
  }
  if (test_pos.empty()) {
    throw Error(ErrorCode::kEmptyPartition,
                fmt::format("no rows with {} >= {}: test side is empty", column, threshold));
  }
  SplitDataset split{dataset.subset(train_pos), dataset.subset(test_pos)};
  if (!keep_column) {
    split.train = split.train.without_feature(*col);
    split.test = split.test.without_feature(*col);
  }
  return split;
}

}  // namespace mcbrp
