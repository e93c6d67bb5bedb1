#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace botdetect::ml {

// Rows are samples. Row-major so a sample is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Wraps row-major doubles (NaN = missing) into a Matrix.
Matrix from_dense(std::span<const double> values, std::size_t rows,
                  std::size_t cols);

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);

inline std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

std::vector<int> select(std::span<const int> v, std::span<const std::size_t> idx);

// Index of the largest element; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

}  // namespace botdetect::ml
