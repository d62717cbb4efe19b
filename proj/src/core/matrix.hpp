#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace sdti {

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using IntMatrix = Matrix<long>;

// Stack of equally shaped row-major matrices: slices x rows x cols.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t slices, std::size_t rows, std::size_t cols, double fill = 0.0)
      : slices_(slices), rows_(rows), cols_(cols), data_(slices * rows * cols, fill) {}

  std::size_t slices() const noexcept { return slices_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t slice_size() const noexcept { return rows_ * cols_; }

  double& operator()(std::size_t q, std::size_t r, std::size_t c) {
    assert(q < slices_ && r < rows_ && c < cols_);
    return data_[(q * rows_ + r) * cols_ + c];
  }
  double operator()(std::size_t q, std::size_t r, std::size_t c) const {
    assert(q < slices_ && r < rows_ && c < cols_);
    return data_[(q * rows_ + r) * cols_ + c];
  }

  std::span<double> slice(std::size_t q) { return {data_.data() + q * slice_size(), slice_size()}; }
  std::span<const double> slice(std::size_t q) const {
    return {data_.data() + q * slice_size(), slice_size()};
  }

  bool same_shape(const Tensor3& other) const noexcept {
    return slices_ == other.slices_ && rows_ == other.rows_ && cols_ == other.cols_;
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t slices_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace sdti
