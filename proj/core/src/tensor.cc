// core/src/tensor.cc

// Copyright 2026  msdgp authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "msdgp/tensor.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "msdgp/error.h"

namespace msdgp {

int64_t shape_numel(const Shape &shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape &shape) {
  std::ostringstream oss;
  oss << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) oss << ",";
    oss << shape[i];
  }
  oss << "]";
  return oss.str();
}

bool shapes_equal(const Shape &a, const Shape &b) { return a == b; }

Tensor::Tensor()
    : shape_(), data_(std::make_shared<const std::vector<double>>(1, 0.0)) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)) {
  for (int64_t d : shape_) {
    if (d < 0) throw ShapeMismatch("negative dimension in " + shape_to_string(shape_));
  }
  if (shape_numel(shape_) != static_cast<int64_t>(data.size())) {
    throw ShapeMismatch("shape " + shape_to_string(shape_) + " wants " +
                        std::to_string(shape_numel(shape_)) + " elements, got " +
                        std::to_string(data.size()));
  }
  data_ = std::make_shared<const std::vector<double>>(std::move(data));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::zeros(Shape shape) {
  int64_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(static_cast<size_t>(n), 0.0));
}

Tensor Tensor::full(Shape shape, double value) {
  int64_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(static_cast<size_t>(n), value));
}

Tensor Tensor::eye(int64_t n) {
  std::vector<double> d(static_cast<size_t>(n * n), 0.0);
  for (int64_t i = 0; i < n; ++i) d[static_cast<size_t>(i * n + i)] = 1.0;
  return Tensor({n, n}, std::move(d));
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>> &rows) {
  int64_t r = static_cast<int64_t>(rows.size());
  int64_t c = rows.empty() ? 0 : static_cast<int64_t>(rows[0].size());
  std::vector<double> d;
  d.reserve(static_cast<size_t>(r * c));
  for (const auto &row : rows) {
    if (static_cast<int64_t>(row.size()) != c)
      throw ShapeMismatch("ragged rows in from_rows");
    d.insert(d.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(d));
}

int64_t Tensor::dim(int axis) const {
  if (axis < 0 || axis >= rank())
    throw IndexOutOfRange("axis " + std::to_string(axis) + " for rank " +
                          std::to_string(rank()));
  return shape_[static_cast<size_t>(axis)];
}

double Tensor::at(std::initializer_list<int64_t> index) const {
  if (static_cast<int>(index.size()) != rank())
    throw IndexOutOfRange("index rank " + std::to_string(index.size()) +
                          " for tensor rank " + std::to_string(rank()));
  int64_t flat = 0;
  int axis = 0;
  for (int64_t i : index) {
    int64_t d = shape_[static_cast<size_t>(axis)];
    if (i < 0 || i >= d)
      throw IndexOutOfRange("index " + std::to_string(i) + " out of [0," +
                            std::to_string(d) + ") on axis " + std::to_string(axis));
    flat = flat * d + i;
    ++axis;
  }
  return (*data_)[static_cast<size_t>(flat)];
}

double Tensor::item() const {
  if (numel() != 1)
    throw ShapeMismatch("item() on tensor with " + std::to_string(numel()) +
                        " elements");
  return (*data_)[0];
}

Tensor Tensor::with_requires_grad(bool value) const {
  Tensor t = *this;
  t.requires_grad_ = value;
  return t;
}

bool Tensor::all_finite() const {
  for (double v : *data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Tensor::same_bits(const Tensor &other) const {
  if (shape_ != other.shape_) return false;
  if (data_->empty()) return other.data_->empty();
  return std::memcmp(data_->data(), other.data_->data(),
                     data_->size() * sizeof(double)) == 0;
}

}  // namespace msdgp
