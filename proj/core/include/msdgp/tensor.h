// core/include/msdgp/tensor.h

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

#ifndef MSDGP_TENSOR_H_
#define MSDGP_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace msdgp {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape &shape);
std::string shape_to_string(const Shape &shape);
bool shapes_equal(const Shape &a, const Shape &b);

// Dense n-dimensional array of 64-bit floats, row-major. Tensors are
// immutable values: the payload is shared on copy and never written after
// construction, so they are safe to share read-only across threads.
class Tensor {
 public:
  Tensor();  // rank-0 zero scalar
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor eye(int64_t n);
  // 2-D convenience: rows of equal length.
  static Tensor from_rows(const std::vector<std::vector<double>> &rows);

  const Shape &shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int axis) const;
  int64_t numel() const { return static_cast<int64_t>(data_->size()); }
  int64_t rows() const { return dim(0); }
  int64_t cols() const { return dim(1); }

  std::span<const double> data() const { return {data_->data(), data_->size()}; }
  double operator[](int64_t flat_index) const { return (*data_)[flat_index]; }
  double at(std::initializer_list<int64_t> index) const;
  // Value of a rank-0 or single-element tensor.
  double item() const;

  bool requires_grad() const { return requires_grad_; }
  Tensor with_requires_grad(bool value) const;

  bool all_finite() const;
  bool same_bits(const Tensor &other) const;

 private:
  Shape shape_;
  std::shared_ptr<const std::vector<double>> data_;
  bool requires_grad_ = false;
};

}  // namespace msdgp

#endif  // MSDGP_TENSOR_H_
