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

#include "armgnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include <Eigen/Dense>

namespace armgnn {

namespace {

using DynStride = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;
using StridedMap = Eigen::Map<RowMatrix, 0, DynStride>;
using ConstStridedMap = Eigen::Map<const RowMatrix, 0, DynStride>;

Tape& same_tape(const Var& a, const Var& b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw std::invalid_argument("operands are not recorded on the same tape");
  }
  return *a.tape();
}

Tape& tape_of(const Var& a) {
  if (a.tape() == nullptr) throw std::invalid_argument("variable is not bound to a tape");
  return *a.tape();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

std::vector<std::size_t> strides_of(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

void check_permutation(const std::vector<std::size_t>& perm, std::size_t rank) {
  if (perm.size() != rank) throw ShapeError("permutation rank mismatch");
  std::vector<bool> seen(rank, false);
  for (auto p : perm) {
    if (p >= rank || seen[p]) throw ShapeError("malformed permutation");
    seen[p] = true;
  }
}

bool is_identity_permutation(const std::vector<std::size_t>& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] != i) return false;
  }
  return true;
}

// Scatters a permuted buffer back into the source layout (adds).
void add_unpermuted(std::span<const double> permuted_values, const Shape& source_shape,
                    const std::vector<std::size_t>& perm, std::vector<double>& dst) {
  Shape permuted_shape(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) permuted_shape[i] = source_shape[perm[i]];
  Tensor src(permuted_shape, std::vector<double>(permuted_values.begin(), permuted_values.end()));
  Tensor back = permuted(src, inverse_permutation(perm));
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += back[i];
}

}  // namespace

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  for (auto d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
  }
  data_.assign(element_count(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
  }
  if (element_count(shape_) != data_.size()) {
    throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                     shape_string(shape_));
  }
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(Shape{n, n});
  for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
  return t;
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) throw ShapeError("index rank mismatch");
  std::size_t off = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) throw std::out_of_range("tensor index out of range");
    off = off * shape_[axis] + i;
    ++axis;
  }
  return off;
}

double& Tensor::at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
double Tensor::at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

MatrixMap Tensor::matrix(std::size_t rows, std::size_t cols) {
  if (rows * cols != data_.size()) throw ShapeError("matrix view size mismatch");
  return MatrixMap(data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

ConstMatrixMap Tensor::matrix(std::size_t rows, std::size_t cols) const {
  if (rows * cols != data_.size()) throw ShapeError("matrix view size mismatch");
  return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

std::span<double> Tensor::grad() {
  if (!grad_) throw std::logic_error("tensor has no gradient");
  return *grad_;
}

std::span<const double> Tensor::grad() const {
  if (!grad_) throw std::logic_error("tensor has no gradient");
  return *grad_;
}

Tensor Tensor::reshaped(Shape shape) const {
  if (element_count(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

Tensor permuted(const Tensor& x, const std::vector<std::size_t>& perm) {
  check_permutation(perm, x.rank());
  if (is_identity_permutation(perm)) return x.reshaped(x.shape());
  const auto in_strides = strides_of(x.shape());
  Shape out_shape(perm.size());
  std::vector<std::size_t> src_stride(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out_shape[i] = x.dim(perm[i]);
    src_stride[i] = in_strides[perm[i]];
  }
  Tensor out(out_shape);
  std::vector<std::size_t> idx(perm.size(), 0);
  std::size_t src = 0;
  const auto in = x.data();
  auto o = out.data();
  for (std::size_t n = 0; n < out.size(); ++n) {
    o[n] = in[src];
    for (std::size_t ax = perm.size(); ax-- > 0;) {
      ++idx[ax];
      src += src_stride[ax];
      if (idx[ax] < out_shape[ax]) break;
      src -= src_stride[ax] * out_shape[ax];
      idx[ax] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tape

const Tensor& Var::value() const { return tape_of(*this).value(id_); }

std::span<const double> Var::grad() const { return tape_of(*this).grad(id_); }

Var Tape::constant(Tensor value) { return record(std::move(value), {}, nullptr); }

Var Tape::parameter(Tensor& value) {
  Node node;
  node.external = &value;
  node.accumulate = true;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::reference(const Tensor& value) {
  Node node;
  // Never written through: accumulate stays false.
  node.external = const_cast<Tensor*>(&value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<std::size_t> inputs, Adjoint adjoint) {
  Node node;
  node.value = std::move(value);
  node.inputs = std::move(inputs);
  node.adjoint = std::move(adjoint);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::value(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.external ? *n.external : n.value;
}

std::span<const double> Tape::grad(std::size_t id) const { return nodes_.at(id).grad; }

std::vector<double>& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(value(id).size(), 0.0);
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw std::invalid_argument("loss is not recorded on this tape");
  if (value(loss.id()).size() != 1) {
    throw ShapeError("backward requires a scalar loss, got " +
                     shape_string(value(loss.id()).shape()));
  }
  for (auto& n : nodes_) n.grad.clear();
  grad_buffer(loss.id())[0] = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.grad.empty()) continue;
    if (n.adjoint) n.adjoint(*this, id);
    if (n.external && n.accumulate) {
      if (!n.external->has_grad()) n.external->zero_grad();
      auto g = n.external->grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  }
}

// ---------------------------------------------------------------------------
// Elementwise and reductions

Var operator+(const Var& a, const Var& b) {
  Tape& tape = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_same_shape(av, bv, "add");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    auto& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    auto& gb = t.grad_buffer(ib);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
  });
}

Var operator-(const Var& a, const Var& b) {
  Tape& tape = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_same_shape(av, bv, "sub");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    auto& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    auto& gb = t.grad_buffer(ib);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
  });
}

Var operator*(double s, const Var& a) {
  Tape& tape = tape_of(a);
  Tensor out = a.value().reshaped(a.value().shape());
  for (auto& v : out.values()) v *= s;
  const std::size_t ia = a.id();
  return tape.record(std::move(out), {ia}, [ia, s](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    auto& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

Var sum(const Var& a) {
  Tape& tape = tape_of(a);
  const auto& v = a.value().values();
  double total = 0.0;
  for (double x : v) total += x;
  const std::size_t ia = a.id();
  return tape.record(Tensor::scalar(total), {ia}, [ia](Tape& t, std::size_t self) {
    const double g = t.grad_buffer(self)[0];
    for (auto& x : t.grad_buffer(ia)) x += g;
  });
}

Var mean(const Var& a) {
  return (1.0 / static_cast<double>(a.value().size())) * sum(a);
}

// ---------------------------------------------------------------------------
// Products

Var matmul(const Var& a, const Var& b) {
  Tape& tape = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(0)) {
    throw ShapeError("matmul: incompatible shapes " + shape_string(av.shape()) + " and " +
                     shape_string(bv.shape()));
  }
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  Tensor out(Shape{m, n});
  out.matrix(m, n).noalias() = av.matrix(m, k) * bv.matrix(k, n);
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record(std::move(out), {ia, ib}, [ia, ib, m, k, n](Tape& t, std::size_t self) {
    ConstMatrixMap g(t.grad_buffer(self).data(), m, n);
    const Tensor& A = t.value(ia);
    const Tensor& B = t.value(ib);
    MatrixMap(t.grad_buffer(ia).data(), m, k).noalias() += g * B.matrix(k, n).transpose();
    MatrixMap(t.grad_buffer(ib).data(), k, n).noalias() += A.matrix(m, k).transpose() * g;
  });
}

Var contract(const Var& a, const Var& b, const AxisPairs& pairs) {
  Tape& tape = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (pairs.empty()) throw ShapeError("contract: no paired axes");
  std::vector<bool> used_a(av.rank(), false), used_b(bv.rank(), false);
  std::size_t paired = 1;
  for (auto [pa, pb] : pairs) {
    if (pa >= av.rank() || pb >= bv.rank() || used_a[pa] || used_b[pb]) {
      throw ShapeError("contract: malformed axis pairing");
    }
    if (av.dim(pa) != bv.dim(pb)) {
      throw ShapeError("contract: paired axes differ in size (" + std::to_string(av.dim(pa)) +
                       " vs " + std::to_string(bv.dim(pb)) + ")");
    }
    used_a[pa] = used_b[pb] = true;
    paired *= av.dim(pa);
  }
  std::vector<std::size_t> perm_a, perm_b;
  Shape out_shape;
  std::size_t free_a = 1, free_b = 1;
  for (std::size_t i = 0; i < av.rank(); ++i) {
    if (!used_a[i]) {
      perm_a.push_back(i);
      out_shape.push_back(av.dim(i));
      free_a *= av.dim(i);
    }
  }
  for (auto [pa, pb] : pairs) {
    perm_a.push_back(pa);
    perm_b.push_back(pb);
  }
  for (std::size_t i = 0; i < bv.rank(); ++i) {
    if (!used_b[i]) {
      perm_b.push_back(i);
      out_shape.push_back(bv.dim(i));
      free_b *= bv.dim(i);
    }
  }
  if (out_shape.empty()) out_shape.push_back(1);

  auto pa_tensor = std::make_shared<Tensor>(permuted(av, perm_a));
  auto pb_tensor = std::make_shared<Tensor>(permuted(bv, perm_b));
  Tensor out(out_shape);
  out.matrix(free_a, free_b).noalias() =
      pa_tensor->matrix(free_a, paired) * pb_tensor->matrix(paired, free_b);

  const std::size_t ia = a.id(), ib = b.id();
  const Shape shape_a = av.shape(), shape_b = bv.shape();
  return tape.record(std::move(out), {ia, ib},
                     [=](Tape& t, std::size_t self) {
                       ConstMatrixMap g(t.grad_buffer(self).data(), free_a, free_b);
                       Tensor ga_perm(Shape{free_a, paired});
                       ga_perm.matrix(free_a, paired).noalias() =
                           g * pb_tensor->matrix(paired, free_b).transpose();
                       add_unpermuted(ga_perm.data(), shape_a, perm_a, t.grad_buffer(ia));
                       Tensor gb_perm(Shape{paired, free_b});
                       gb_perm.matrix(paired, free_b).noalias() =
                           pa_tensor->matrix(free_a, paired).transpose() * g;
                       add_unpermuted(gb_perm.data(), shape_b, perm_b, t.grad_buffer(ib));
                     });
}

// ---------------------------------------------------------------------------
// Layers

Var prelu(const Var& x, const Var& slope) {
  Tape& tape = same_tape(x, slope);
  const Tensor& xv = x.value();
  if (slope.value().size() != 1) throw ShapeError("prelu: slope must have one element");
  const double a = slope.value()[0];
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : a * xv[i];
  const std::size_t ix = x.id(), is = slope.id();
  return tape.record(std::move(out), {ix, is}, [ix, is](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    const Tensor& xv = t.value(ix);
    const double a = t.value(is)[0];
    auto& gx = t.grad_buffer(ix);
    double ga = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xv[i] > 0.0) {
        gx[i] += g[i];
      } else {
        gx[i] += a * g[i];
        ga += xv[i] * g[i];
      }
    }
    t.grad_buffer(is)[0] += ga;
  });
}

Var conv2d(const Var& x, const Var& kernels) {
  Tape& tape = same_tape(x, kernels);
  const Tensor& xv = x.value();
  const Tensor& kv = kernels.value();
  if (xv.rank() != 3 || kv.rank() != 4 || kv.dim(2) != 3 || kv.dim(3) != 3 ||
      kv.dim(1) != xv.dim(0)) {
    throw ShapeError("conv2d: incompatible shapes " + shape_string(xv.shape()) + " and " +
                     shape_string(kv.shape()));
  }
  const std::size_t cin = xv.dim(0), h = xv.dim(1), w = xv.dim(2), cout = kv.dim(0);
  const std::size_t plane = h * w, patch = cin * 9;

  auto cols = std::make_shared<RowMatrix>(RowMatrix::Zero(patch, plane));
  for (std::size_t c = 0; c < cin; ++c) {
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        const std::size_t row = c * 9 + ky * 3 + kx;
        for (std::size_t y = 0; y < h; ++y) {
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
          for (std::size_t xx = 0; xx < w; ++xx) {
            const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - 1;
            if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
            (*cols)(row, y * w + xx) = xv[(c * h + sy) * w + sx];
          }
        }
      }
    }
  }
  Tensor out(Shape{cout, h, w});
  out.matrix(cout, plane).noalias() = kv.matrix(cout, patch) * (*cols);

  const std::size_t ix = x.id(), ik = kernels.id();
  return tape.record(std::move(out), {ix, ik}, [=](Tape& t, std::size_t self) {
    ConstMatrixMap g(t.grad_buffer(self).data(), cout, plane);
    const Tensor& kv = t.value(ik);
    MatrixMap(t.grad_buffer(ik).data(), cout, patch).noalias() += g * cols->transpose();
    RowMatrix gcols = kv.matrix(cout, patch).transpose() * g;
    auto& gx = t.grad_buffer(ix);
    for (std::size_t c = 0; c < cin; ++c) {
      for (std::size_t ky = 0; ky < 3; ++ky) {
        for (std::size_t kx = 0; kx < 3; ++kx) {
          const std::size_t row = c * 9 + ky * 3 + kx;
          for (std::size_t y = 0; y < h; ++y) {
            const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
            if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t xx = 0; xx < w; ++xx) {
              const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - 1;
              if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
              gx[(c * h + sy) * w + sx] += gcols(row, y * w + xx);
            }
          }
        }
      }
    }
  });
}

Var add_bias(const Var& x, const Var& bias) {
  Tape& tape = same_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (xv.rank() < 1 || bv.size() != xv.dim(0)) {
    throw ShapeError("add_bias: bias length must equal leading dimension");
  }
  const std::size_t n = xv.dim(0), inner = xv.size() / n;
  Tensor out = xv.reshaped(xv.shape());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < inner; ++j) out[i * inner + j] += bv[i];
  }
  const std::size_t ix = x.id(), ib = bias.id();
  return tape.record(std::move(out), {ix, ib}, [ix, ib, n, inner](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    auto& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    auto& gb = t.grad_buffer(ib);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < inner; ++j) s += g[i * inner + j];
      gb[i] += s;
    }
  });
}

Var graph_mix(const Var& adj, const Var& x, std::size_t mix_axis) {
  Tape& tape = same_tape(adj, x);
  const Tensor& av = adj.value();
  const Tensor& xv = x.value();
  if (xv.rank() != 3 || (mix_axis != 1 && mix_axis != 2)) {
    throw ShapeError("graph_mix: expects a rank-3 input and mix axis 1 or 2");
  }
  const std::size_t c = xv.dim(0), d1 = xv.dim(1), d2 = xv.dim(2);
  const std::size_t batch = mix_axis == 1 ? d2 : d1;
  const std::size_t n = mix_axis == 1 ? d1 : d2;
  if (av.shape() != Shape{batch, n, n}) {
    throw ShapeError("graph_mix: adjacency shape " + shape_string(av.shape()) +
                     " does not match " + shape_string(Shape{batch, n, n}));
  }
  const auto outer = static_cast<Eigen::Index>(d1 * d2);
  const auto inner = static_cast<Eigen::Index>(mix_axis == 1 ? d2 : 1);
  const auto base = [=](std::size_t b) { return mix_axis == 1 ? b : b * d2; };
  const auto ci = static_cast<Eigen::Index>(c), ni = static_cast<Eigen::Index>(n);

  Tensor out(xv.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    ConstStridedMap xb(xv.data().data() + base(b), ci, ni, DynStride(outer, inner));
    StridedMap ob(out.data().data() + base(b), ci, ni, DynStride(outer, inner));
    ConstMatrixMap ab(av.data().data() + b * n * n, ni, ni);
    ob.noalias() = xb * ab.transpose();
  }
  const std::size_t ia = adj.id(), ix = x.id();
  return tape.record(std::move(out), {ia, ix}, [=](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    const Tensor& av = t.value(ia);
    const Tensor& xv = t.value(ix);
    auto& ga = t.grad_buffer(ia);
    auto& gx = t.grad_buffer(ix);
    for (std::size_t b = 0; b < batch; ++b) {
      ConstStridedMap gb(g.data() + base(b), ci, ni, DynStride(outer, inner));
      ConstStridedMap xb(xv.data().data() + base(b), ci, ni, DynStride(outer, inner));
      ConstMatrixMap ab(av.data().data() + b * n * n, ni, ni);
      StridedMap gxb(gx.data() + base(b), ci, ni, DynStride(outer, inner));
      MatrixMap gab(ga.data() + b * n * n, ni, ni);
      gxb.noalias() += gb * ab;
      gab.noalias() += gb.transpose() * xb;
    }
  });
}

// ---------------------------------------------------------------------------
// Layout

Var permute(const Var& x, const std::vector<std::size_t>& perm) {
  Tape& tape = tape_of(x);
  Tensor out = permuted(x.value(), perm);
  const std::size_t ix = x.id();
  const Shape source = x.value().shape();
  return tape.record(std::move(out), {ix}, [ix, perm, source](Tape& t, std::size_t self) {
    add_unpermuted(t.grad_buffer(self), source, perm, t.grad_buffer(ix));
  });
}

Var reshape(const Var& x, Shape shape) {
  Tape& tape = tape_of(x);
  Tensor out = x.value().reshaped(std::move(shape));
  const std::size_t ix = x.id();
  return tape.record(std::move(out), {ix}, [ix](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    auto& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

Var concat(const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Tape& tape = tape_of(parts.front());
  const Shape& first = parts.front().value().shape();
  if (axis >= first.size()) throw ShapeError("concat: axis out of range");
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> ids, extents;
  for (const auto& p : parts) {
    if (p.tape() != &tape) throw std::invalid_argument("concat: mixed tapes");
    const Shape& s = p.value().shape();
    if (s.size() != first.size()) throw ShapeError("concat: rank mismatch");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != first[i]) throw ShapeError("concat: shape mismatch off-axis");
    }
    out_shape[axis] += s[axis];
    ids.push_back(p.id());
    extents.push_back(s[axis]);
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= first[i];
  for (std::size_t i = axis + 1; i < first.size(); ++i) inner *= first[i];
  const std::size_t total = out_shape[axis];

  Tensor out(out_shape);
  std::size_t at = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto src = parts[p].value().data();
    const std::size_t block = extents[p] * inner;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(src.begin() + o * block, block, out.data().begin() + (o * total + at) * inner);
    }
    at += extents[p];
  }
  return tape.record(std::move(out), ids, [=](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    std::size_t at = 0;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      auto& gp = t.grad_buffer(ids[p]);
      const std::size_t block = extents[p] * inner;
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t j = 0; j < block; ++j) gp[o * block + j] += g[(o * total + at) * inner + j];
      }
      at += extents[p];
    }
  });
}

Var slice(const Var& x, std::size_t axis, std::size_t begin, std::size_t end) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  if (axis >= xv.rank() || begin >= end || end > xv.dim(axis)) {
    throw ShapeError("slice: invalid range");
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= xv.dim(i);
  for (std::size_t i = axis + 1; i < xv.rank(); ++i) inner *= xv.dim(i);
  const std::size_t total = xv.dim(axis), len = end - begin;
  Shape out_shape = xv.shape();
  out_shape[axis] = len;
  Tensor out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(xv.data().begin() + (o * total + begin) * inner, len * inner,
                out.data().begin() + o * len * inner);
  }
  const std::size_t ix = x.id();
  return tape.record(std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    auto& gx = t.grad_buffer(ix);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t j = 0; j < len * inner; ++j) {
        gx[(o * total + begin) * inner + j] += g[o * len * inner + j];
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Norms

Var norm(const Var& x) {
  Tape& tape = tape_of(x);
  double sq = 0.0;
  for (double v : x.value().values()) sq += v * v;
  const double n = std::sqrt(sq);
  const std::size_t ix = x.id();
  return tape.record(Tensor::scalar(n), {ix}, [ix](Tape& t, std::size_t self) {
    const double g = t.grad_buffer(self)[0];
    const double n = t.value(self)[0];
    if (n == 0.0) return;
    const Tensor& xv = t.value(ix);
    auto& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g * xv[i] / n;
  });
}

Var norm_along(const Var& x, std::size_t axis) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  if (axis >= xv.rank()) throw ShapeError("norm_along: axis out of range");
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= xv.dim(i);
  for (std::size_t i = axis + 1; i < xv.rank(); ++i) inner *= xv.dim(i);
  const std::size_t len = xv.dim(axis);
  Shape out_shape;
  for (std::size_t i = 0; i < xv.rank(); ++i) {
    if (i != axis) out_shape.push_back(xv.dim(i));
  }
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t j = 0; j < inner; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const double v = xv[(o * len + k) * inner + j];
        sq += v * v;
      }
      out[o * inner + j] = std::sqrt(sq);
    }
  }
  const std::size_t ix = x.id();
  return tape.record(std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    const auto& g = t.grad_buffer(self);
    const Tensor& nv = t.value(self);
    const Tensor& xv = t.value(ix);
    auto& gx = t.grad_buffer(ix);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t j = 0; j < inner; ++j) {
        const double n = nv[o * inner + j];
        if (n == 0.0) continue;
        const double s = g[o * inner + j] / n;
        for (std::size_t k = 0; k < len; ++k) {
          const std::size_t i = (o * len + k) * inner + j;
          gx[i] += s * xv[i];
        }
      }
    }
  });
}

}  // namespace armgnn
