// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <functional>
#include <numeric>

#include "moher/autodiff.hpp"

namespace moher::ad {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : shape_{rows, cols}, data_(rows * cols, fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  const std::size_t expected =
      std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
  if (expected != data_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string());
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Tensor t(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("from_rows: ragged rows");
    for (double v : row) t.data_[i++] = v;
  }
  return t;
}

Tensor Tensor::row(std::span<const double> values) {
  return Tensor({1, values.size()}, std::vector<double>(values.begin(), values.end()));
}

std::size_t Tensor::rows() const {
  if (shape_.size() != 2) throw ShapeError("expected a rank-2 tensor, got " + shape_string());
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() != 2) throw ShapeError("expected a rank-2 tensor, got " + shape_string());
  return shape_[1];
}

std::span<double> Tensor::row_span(std::size_t r) { return {data_.data() + r * cols(), cols()}; }

std::span<const double> Tensor::row_span(std::size_t r) const {
  return {data_.data() + r * cols(), cols()};
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace moher::ad
