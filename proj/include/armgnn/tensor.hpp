// Copyright 2026 The armgnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace armgnn {

using Shape = std::vector<std::size_t>;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient buffer of the
/// same shape.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value) { return Tensor(Shape{1}, value); }
  static Tensor identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Multi-index access, e.g. t.at({c, t, v}).
  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  /// View as a rows x cols matrix; rows * cols must equal size().
  MatrixMap matrix(std::size_t rows, std::size_t cols);
  ConstMatrixMap matrix(std::size_t rows, std::size_t cols) const;

  bool has_grad() const { return grad_.has_value(); }
  std::span<double> grad();
  std::span<const double> grad() const;
  void zero_grad() { grad_.emplace(data_.size(), 0.0); }
  void clear_grad() { grad_.reset(); }

  Tensor reshaped(Shape shape) const;

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> data_;
  std::optional<std::vector<double>> grad_;
};

/// Axis pairing for contract(): each entry pairs an axis of the left operand
/// with an axis of the right operand to be summed over.
using AxisPairs = std::vector<std::pair<std::size_t, std::size_t>>;

/// Permute the axes of a tensor. Output axis i is input axis perm[i].
Tensor permuted(const Tensor& x, const std::vector<std::size_t>& perm);

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  /// Gradient after Tape::backward; empty if the node was not reached.
  std::span<const double> grad() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode gradient tape. Nodes are appended in evaluation order and
/// backward() replays adjoint rules in reverse. A tape is not thread-safe,
/// but independent tapes share no state.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Records a reference to an external tensor. backward() accumulates into
  /// its grad buffer, allocating it if absent. The tensor must outlive the
  /// tape.
  Var parameter(Tensor& value);
  /// Records a reference to an external tensor without gradient write-back.
  Var reference(const Tensor& value);

  /// Computes gradients of a scalar loss for every reachable node.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Used by op implementations.
  using Adjoint = std::function<void(Tape&, std::size_t)>;
  Var record(Tensor value, std::vector<std::size_t> inputs, Adjoint adjoint);
  const Tensor& value(std::size_t id) const;
  std::span<const double> grad(std::size_t id) const;
  std::vector<double>& grad_buffer(std::size_t id);

 private:
  struct Node {
    Tensor value;
    Tensor* external = nullptr;
    bool accumulate = false;
    std::vector<std::size_t> inputs;
    Adjoint adjoint;
    std::vector<double> grad;
  };

  std::vector<Node> nodes_;
};

// Differentiable primitives. All operands must live on the same tape.

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(double s, const Var& a);
Var sum(const Var& a);
Var mean(const Var& a);

Var matmul(const Var& a, const Var& b);
/// Tensordot-style contraction: paired axes are summed; the result carries the
/// free axes of `a` in order followed by the free axes of `b` in order.
Var contract(const Var& a, const Var& b, const AxisPairs& pairs);

/// Elementwise x if x > 0 else slope * x. `slope` is a one-element tensor.
Var prelu(const Var& x, const Var& slope);

/// 3x3 cross-correlation with zero padding 1. x: Cin x H x W,
/// kernels: Cout x Cin x 3 x 3 -> Cout x H x W.
Var conv2d(const Var& x, const Var& kernels);

/// Adds b[i] to every element of slice i along axis 0.
Var add_bias(const Var& x, const Var& bias);

/// Batched graph mixing on a rank-3 tensor x: C x D1 x D2. With mix_axis = 1,
/// out[c,i,j] = sum_k adj[j,i,k] * x[c,k,j] (adj: D2 x D1 x D1); with
/// mix_axis = 2, out[c,i,j] = sum_k adj[i,j,k] * x[c,i,k] (adj: D1 x D2 x D2).
Var graph_mix(const Var& adj, const Var& x, std::size_t mix_axis);

Var permute(const Var& x, const std::vector<std::size_t>& perm);
Var reshape(const Var& x, Shape shape);
Var concat(const std::vector<Var>& parts, std::size_t axis);
Var slice(const Var& x, std::size_t axis, std::size_t begin, std::size_t end);

/// Euclidean norm of all elements; scalar result.
Var norm(const Var& x);
/// Euclidean norms along `axis`; the axis is removed from the result shape.
/// The adjoint at a zero vector is zero.
Var norm_along(const Var& x, std::size_t axis);

}  // namespace armgnn
