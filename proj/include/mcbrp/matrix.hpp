#ifndef MCBRP_MATRIX_HPP_
#define MCBRP_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace mcbrp {

// Dense row-major matrix of doubles. One row is one observation.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  // Appends a row; the first append on an empty 0-column matrix fixes the width.
  void push_row(std::span<const double> values);

  std::vector<double> column(std::size_t j) const;

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace mcbrp

#endif  // MCBRP_MATRIX_HPP_
