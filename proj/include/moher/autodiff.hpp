// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "moher/common.hpp"

namespace moher::ad {

/// Dense row-major float64 array. The operators below work on rank-2 tensors;
/// a row vector is 1 x n.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor row(std::span<const double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> row_span(std::size_t r);
  std::span<const double> row_span(std::size_t r) const;

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_string() const;
  void fill(double v);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

struct Param {
  Tensor value;
  Tensor grad;
  Tensor m;  // Adam first moment
  Tensor v;  // Adam second moment
  std::uint64_t step = 0;
};

/// Named differentiable arrays plus optimizer state. Iteration order is the
/// lexicographic name order, which checkpoints rely on.
class ParamStore {
 public:
  Param& add(const std::string& name, Tensor init);
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.contains(name); }
  void zero_grad();
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  std::size_t scalar_count(std::string_view prefix) const;
  std::vector<std::string> names() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Param> params_;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam on every parameter. Gradients are left untouched.
void adam_step(ParamStore& store, const AdamOptions& options = {});

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Append-only record of primitive applications. Inputs always precede their
/// outputs, so reverse insertion order is a reverse topological order.
class Tape {
 public:
  /// Receives the node's output and its gradient; accumulates into inputs.
  using Backward = std::function<void(Tape&, const Tensor& out, const Tensor& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Trainable leaf: backward() accumulates into the parameter's gradient.
  Var param(ParamStore& store, const std::string& name);
  /// Frozen leaf reading a shared, read-only store.
  Var param(const ParamStore& store, const std::string& name);

  /// Records an op result. The backward closure is dropped when no input
  /// requires a gradient.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, std::span<const Var> inputs, Backward backward);

  const Tensor& value(const Var& v) const;
  bool requires_grad(const Var& v) const;
  /// Gradient buffer of `v`, zero-initialised on first use.
  Tensor& grad(const Var& v);
  /// Gradient of `v` after backward(); empty if none reached it.
  const Tensor& grad_of(const Var& v) const;

  /// Seeds d(loss)/d(loss) = 1 and visits every node once in reverse order.
  void backward(const Var& loss);

  std::size_t size() const { return nodes_.size(); }

  /// Hash of the sign pattern of every kink-op input (relu, abs). Two
  /// evaluations with different signatures straddle a non-differentiable point.
  std::uint64_t kink_signature() const { return kink_signature_; }
  void note_kinks(const Tensor& input);
  void set_track_kinks(bool on) { track_kinks_ = on; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* ref = nullptr;
    Tensor grad;
    Backward backward;
    Param* param = nullptr;
    bool requires_grad = false;
    const Tensor& value() const { return ref != nullptr ? *ref : owned; }
  };

  Var push(Node node);
  void check_owner(const Var& v) const;

  std::deque<Node> nodes_;
  std::unordered_map<const void*, std::uint32_t> param_nodes_;
  std::uint64_t kink_signature_ = 0xcbf29ce484222325ULL;
  bool track_kinks_ = false;
};

// Primitives. Shape mismatches throw ShapeError naming both shapes.

Var matmul(const Var& a, const Var& b);
/// Elementwise sum; `b` may also be a 1 x cols row broadcast over a's rows.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
/// Elementwise (Hadamard) product.
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
/// |a| with subgradient 0 at 0.
Var abs_elem(const Var& a);
Var relu(const Var& a);
Var tanh(const Var& a);
Var sigmoid(const Var& a);
/// axis 0 stacks rows, axis 1 joins columns.
Var concat(std::span<const Var> parts, int axis);
Var slice_rows(const Var& a, std::size_t begin, std::size_t count);
Var slice_cols(const Var& a, std::size_t begin, std::size_t count);
Var reshape(const Var& a, std::size_t rows, std::size_t cols);
/// Sum over rows: (r x c) -> (1 x c).
Var sum_rows(const Var& a);
/// Mean squared error over all entries -> 1 x 1.
Var mse(const Var& pred, const Var& target);
/// out[k] = weight[k] * a[index[k]]; index -1 yields a zero row. Empty
/// `weights` means all ones.
Var gather_rows(const Var& a, std::vector<std::int64_t> index, std::vector<double> weights = {});
/// out[index[k]] += a[k] into `out_rows` rows.
Var scatter_add_rows(const Var& a, std::vector<std::int64_t> index, std::size_t out_rows);

/// Central-difference check of reverse-mode gradients.
struct KinkFlag {
  std::string param;
  std::size_t index = 0;
};

struct GradCheckReport {
  bool passed = false;
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  std::vector<KinkFlag> kinks;  // coordinates whose stencil crossed a kink; excluded
  bool non_finite = false;
  std::string diagnostics;
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Relative error is |a - n| / max(|a|, |n|, floor).
  double magnitude_floor = 1e-5;
};

using ScalarFn = std::function<Var(Tape&, const Var& x)>;
GradCheckReport grad_check(const ScalarFn& f, const Tensor& x, const GradCheckOptions& options = {});

using LossFn = std::function<Var(Tape&, ParamStore&)>;
/// Checks every coordinate of every parameter in `store`.
GradCheckReport grad_check(ParamStore& store, const LossFn& f, const GradCheckOptions& options = {});

}  // namespace moher::ad
