#include "sattn/numcore/tensor.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>

#include "sattn/error.hpp"

namespace sattn::num {

std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(element_count(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != element_count(shape_)) {
    throw ShapeError("tensor: shape " + to_string(shape_) + " needs " +
                     std::to_string(element_count(shape_)) + " values, got " +
                     std::to_string(data_.size()));
  }
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) { return Tensor(Shape{rows, cols}); }

Tensor Tensor::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{1, n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values) {
  return Tensor(Shape{rows, cols}, std::vector<double>(values));
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{1, 1}, {value}); }

std::size_t Tensor::rows() const noexcept { return shape_.size() == 2 ? shape_[0] : 1; }

std::size_t Tensor::cols() const noexcept {
  if (shape_.empty()) return 1;
  return shape_.back();
}

std::span<double> Tensor::row_span(std::size_t r) noexcept {
  return std::span<double>(data_).subspan(r * cols(), cols());
}

std::span<const double> Tensor::row_span(std::size_t r) const noexcept {
  return std::span<const double>(data_).subspan(r * cols(), cols());
}

void Tensor::fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const noexcept {
  for (const double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) noexcept {
  if (a.shape() != b.shape()) return false;
  if (a.size() == 0) return true;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace sattn::num
