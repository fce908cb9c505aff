#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sattn::num {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t element_count(const Shape& shape);

// Dense row-major tensor of doubles. Rank-2 is the working rank for every
// operation; rank-1 tensors behave as a single row.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(std::size_t rows, std::size_t cols);
  static Tensor row(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::initializer_list<double> values);
  static Tensor scalar(double value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  // Matrix view of the shape: rank 0 -> 1x1, rank 1 -> 1xn, rank 2 as is.
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row_span(std::size_t r) noexcept;
  std::span<const double> row_span(std::size_t r) const noexcept;

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& at(std::size_t r, std::size_t c) noexcept { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const noexcept { return data_[r * cols() + c]; }

  void fill(double value) noexcept;
  bool all_finite() const noexcept;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Equal shapes and identical bit patterns in every entry.
bool bitwise_equal(const Tensor& a, const Tensor& b) noexcept;

}  // namespace sattn::num
