// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <cmath>

#include "moher/autodiff.hpp"
#include "moher/kernels.hpp"

namespace moher::ad {

namespace {

Tape& tape_of(const Var& a) {
  if (a.tape() == nullptr) throw InvalidInput("operation on an unbound Var");
  return *a.tape();
}

Tape& tape_of(const Var& a, const Var& b) {
  if (a.tape() != b.tape()) throw InvalidInput("operands live on different tapes");
  return tape_of(a);
}

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                   b.shape_string());
}

void require_rank2(const char* op, const Tensor& a) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a rank-2 tensor, got " + a.shape_string());
  }
}

template <typename Fn>
Tensor map(const Tensor& a, Fn fn) {
  Tensor out(a.shape(), std::vector<double>(a.size()));
  const double* x = a.data();
  double* y = out.data();
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = fn(x[i]);
  return out;
}

Var add_or_sub(const Var& a, const Var& b, double sign, const char* op) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(op, av);
  require_rank2(op, bv);
  const auto& kern = kernels::active();
  if (av.same_shape(bv)) {
    Tensor out = av;
    kern.axpy(out.size(), sign, bv.data(), out.data());
    return t.record(std::move(out), {a, b}, [a, b, sign](Tape& tp, const Tensor&, const Tensor& g) {
      const auto& kr = kernels::active();
      if (tp.requires_grad(a)) kr.axpy(g.size(), 1.0, g.data(), tp.grad(a).data());
      if (tp.requires_grad(b)) kr.axpy(g.size(), sign, g.data(), tp.grad(b).data());
    });
  }
  if (bv.rows() == 1 && bv.cols() == av.cols()) {
    Tensor out = av;
    const std::size_t rows = av.rows(), cols = av.cols();
    for (std::size_t r = 0; r < rows; ++r) kern.axpy(cols, sign, bv.data(), out.data() + r * cols);
    return t.record(std::move(out), {a, b},
                    [a, b, sign, rows, cols](Tape& tp, const Tensor&, const Tensor& g) {
                      const auto& kr = kernels::active();
                      if (tp.requires_grad(a)) kr.axpy(g.size(), 1.0, g.data(), tp.grad(a).data());
                      if (tp.requires_grad(b)) {
                        double* gb = tp.grad(b).data();
                        for (std::size_t r = 0; r < rows; ++r) {
                          kr.axpy(cols, sign, g.data() + r * cols, gb);
                        }
                      }
                    });
  }
  shape_mismatch(op, av, bv);
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2("matmul", av);
  require_rank2("matmul", bv);
  if (av.cols() != bv.rows()) shape_mismatch("matmul", av, bv);
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  Tensor out(m, n);
  kernels::active().gemm(m, k, n, av.data(), bv.data(), out.data(), false);
  return t.record(std::move(out), {a, b}, [a, b, m, k, n](Tape& tp, const Tensor&, const Tensor& g) {
    const auto& kern = kernels::active();
    if (tp.requires_grad(a)) kern.gemm_nt(m, n, k, g.data(), b.value().data(), tp.grad(a).data());
    if (tp.requires_grad(b)) kern.gemm_tn(m, k, n, a.value().data(), g.data(), tp.grad(b).data());
  });
}

Var add(const Var& a, const Var& b) { return add_or_sub(a, b, 1.0, "add"); }

Var sub(const Var& a, const Var& b) { return add_or_sub(a, b, -1.0, "sub"); }

Var mul(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_mismatch("mul", av, bv);
  Tensor out(av.shape(), std::vector<double>(av.size(), 0.0));
  kernels::active().mul_acc(av.size(), av.data(), bv.data(), out.data());
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Tensor&, const Tensor& g) {
    const auto& kr = kernels::active();
    if (tp.requires_grad(a)) kr.mul_acc(g.size(), g.data(), b.value().data(), tp.grad(a).data());
    if (tp.requires_grad(b)) kr.mul_acc(g.size(), g.data(), a.value().data(), tp.grad(b).data());
  });
}

Var scale(const Var& a, double s) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  Tensor out(av.shape(), std::vector<double>(av.size()));
  kernels::active().scale(av.size(), s, av.data(), out.data());
  return t.record(std::move(out), {a}, [a, s](Tape& tp, const Tensor&, const Tensor& g) {
    kernels::active().axpy(g.size(), s, g.data(), tp.grad(a).data());
  });
}

Var abs_elem(const Var& a) {
  Tape& t = tape_of(a);
  t.note_kinks(a.value());
  Tensor out = map(a.value(), [](double x) { return std::fabs(x); });
  return t.record(std::move(out), {a}, [a](Tape& tp, const Tensor&, const Tensor& g) {
    const double* x = a.value().data();
    double* ga = tp.grad(a).data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] > 0.0) {
        ga[i] += g[i];
      } else if (x[i] < 0.0) {
        ga[i] -= g[i];
      }
    }
  });
}

Var relu(const Var& a) {
  Tape& t = tape_of(a);
  t.note_kinks(a.value());
  Tensor out = map(a.value(), [](double x) { return x > 0.0 ? x : 0.0; });
  return t.record(std::move(out), {a}, [a](Tape& tp, const Tensor&, const Tensor& g) {
    const double* x = a.value().data();
    double* ga = tp.grad(a).data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] > 0.0) ga[i] += g[i];
    }
  });
}

Var tanh(const Var& a) {
  Tape& t = tape_of(a);
  Tensor out = map(a.value(), [](double x) { return std::tanh(x); });
  return t.record(std::move(out), {a}, [a](Tape& tp, const Tensor& y, const Tensor& g) {
    double* ga = tp.grad(a).data();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var sigmoid(const Var& a) {
  Tape& t = tape_of(a);
  Tensor out = map(a.value(), [](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return t.record(std::move(out), {a}, [a](Tape& tp, const Tensor& y, const Tensor& g) {
    double* ga = tp.grad(a).data();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw InvalidInput("concat: no inputs");
  if (axis != 0 && axis != 1) throw InvalidInput("concat: axis must be 0 or 1");
  Tape& t = tape_of(parts.front());
  const Tensor& first = parts.front().value();
  require_rank2("concat", first);
  std::size_t rows = 0, cols = 0;
  for (const Var& p : parts) {
    tape_of(parts.front(), p);
    const Tensor& v = p.value();
    require_rank2("concat", v);
    if (axis == 0) {
      if (v.cols() != first.cols()) shape_mismatch("concat", first, v);
      rows += v.rows();
      cols = v.cols();
    } else {
      if (v.rows() != first.rows()) shape_mismatch("concat", first, v);
      cols += v.cols();
      rows = v.rows();
    }
  }
  Tensor out(rows, cols);
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    offsets.push_back(offset);
    if (axis == 0) {
      std::copy(v.data(), v.data() + v.size(), out.data() + offset * cols);
      offset += v.rows();
    } else {
      for (std::size_t r = 0; r < rows; ++r) {
        std::copy(v.data() + r * v.cols(), v.data() + (r + 1) * v.cols(), out.data() + r * cols + offset);
      }
      offset += v.cols();
    }
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.record(std::move(out), parts,
                  [inputs, offsets, axis, cols](Tape& tp, const Tensor&, const Tensor& g) {
                    for (std::size_t k = 0; k < inputs.size(); ++k) {
                      if (!tp.requires_grad(inputs[k])) continue;
                      Tensor& gi = tp.grad(inputs[k]);
                      const std::size_t ic = gi.cols();
                      if (axis == 0) {
                        const double* src = g.data() + offsets[k] * cols;
                        for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += src[i];
                      } else {
                        for (std::size_t r = 0; r < gi.rows(); ++r) {
                          const double* src = g.data() + r * cols + offsets[k];
                          for (std::size_t c = 0; c < ic; ++c) gi(r, c) += src[c];
                        }
                      }
                    }
                  });
}

Var slice_rows(const Var& a, std::size_t begin, std::size_t count) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  require_rank2("slice_rows", av);
  if (begin + count > av.rows()) {
    throw ShapeError("slice_rows: rows [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") out of range for " + av.shape_string());
  }
  const std::size_t cols = av.cols();
  Tensor out({count, cols}, std::vector<double>(av.data() + begin * cols, av.data() + (begin + count) * cols));
  return t.record(std::move(out), {a}, [a, begin, cols](Tape& tp, const Tensor&, const Tensor& g) {
    kernels::active().axpy(g.size(), 1.0, g.data(), tp.grad(a).data() + begin * cols);
  });
}

Var slice_cols(const Var& a, std::size_t begin, std::size_t count) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  require_rank2("slice_cols", av);
  if (begin + count > av.cols()) {
    throw ShapeError("slice_cols: cols [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") out of range for " + av.shape_string());
  }
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out(rows, count);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(av.data() + r * cols + begin, av.data() + r * cols + begin + count, out.data() + r * count);
  }
  return t.record(std::move(out), {a},
                  [a, begin, count, rows, cols](Tape& tp, const Tensor&, const Tensor& g) {
                    double* ga = tp.grad(a).data();
                    for (std::size_t r = 0; r < rows; ++r) {
                      for (std::size_t c = 0; c < count; ++c) ga[r * cols + begin + c] += g[r * count + c];
                    }
                  });
}

Var reshape(const Var& a, std::size_t rows, std::size_t cols) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  if (rows * cols != av.size()) {
    throw ShapeError("reshape: cannot view " + av.shape_string() + " as [" + std::to_string(rows) +
                     "x" + std::to_string(cols) + "]");
  }
  Tensor out({rows, cols}, std::vector<double>(av.values().begin(), av.values().end()));
  return t.record(std::move(out), {a}, [a](Tape& tp, const Tensor&, const Tensor& g) {
    kernels::active().axpy(g.size(), 1.0, g.data(), tp.grad(a).data());
  });
}

Var sum_rows(const Var& a) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  require_rank2("sum_rows", av);
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out(1, cols);
  for (std::size_t r = 0; r < rows; ++r) kernels::active().axpy(cols, 1.0, av.data() + r * cols, out.data());
  return t.record(std::move(out), {a}, [a, rows, cols](Tape& tp, const Tensor&, const Tensor& g) {
    double* ga = tp.grad(a).data();
    for (std::size_t r = 0; r < rows; ++r) kernels::active().axpy(cols, 1.0, g.data(), ga + r * cols);
  });
}

Var mse(const Var& pred, const Var& target) {
  Tape& t = tape_of(pred, target);
  const Tensor& p = pred.value();
  const Tensor& y = target.value();
  if (!p.same_shape(y)) shape_mismatch("mse", p, y);
  if (p.size() == 0) throw InvalidInput("mse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - y[i];
    s += d * d;
  }
  const double n = static_cast<double>(p.size());
  Tensor out(1, 1, s / n);
  return t.record(std::move(out), {pred, target}, [pred, target, n](Tape& tp, const Tensor&, const Tensor& g) {
    const Tensor& pv = pred.value();
    const Tensor& yv = target.value();
    const double c = 2.0 * g[0] / n;
    if (tp.requires_grad(pred)) {
      double* gp = tp.grad(pred).data();
      for (std::size_t i = 0; i < pv.size(); ++i) gp[i] += c * (pv[i] - yv[i]);
    }
    if (tp.requires_grad(target)) {
      double* gy = tp.grad(target).data();
      for (std::size_t i = 0; i < pv.size(); ++i) gy[i] -= c * (pv[i] - yv[i]);
    }
  });
}

Var gather_rows(const Var& a, std::vector<std::int64_t> index, std::vector<double> weights) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  require_rank2("gather_rows", av);
  if (!weights.empty() && weights.size() != index.size()) {
    throw ShapeError("gather_rows: " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(index.size()) + " rows");
  }
  const std::size_t cols = av.cols();
  const auto src_rows = static_cast<std::int64_t>(av.rows());
  Tensor out(index.size(), cols);
  for (std::size_t k = 0; k < index.size(); ++k) {
    const std::int64_t r = index[k];
    if (r < 0) continue;
    if (r >= src_rows) throw ShapeError("gather_rows: row " + std::to_string(r) + " out of range for " + av.shape_string());
    const double w = weights.empty() ? 1.0 : weights[k];
    kernels::active().axpy(cols, w, av.data() + r * cols, out.data() + k * cols);
  }
  return t.record(std::move(out), {a},
                  [a, index = std::move(index), weights = std::move(weights), cols](
                      Tape& tp, const Tensor&, const Tensor& g) {
                    double* ga = tp.grad(a).data();
                    const auto& kr = kernels::active();
                    for (std::size_t k = 0; k < index.size(); ++k) {
                      if (index[k] < 0) continue;
                      const double w = weights.empty() ? 1.0 : weights[k];
                      kr.axpy(cols, w, g.data() + k * cols, ga + index[k] * cols);
                    }
                  });
}

Var scatter_add_rows(const Var& a, std::vector<std::int64_t> index, std::size_t out_rows) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  require_rank2("scatter_add_rows", av);
  if (index.size() != av.rows()) {
    throw ShapeError("scatter_add_rows: " + std::to_string(index.size()) + " targets for " +
                     av.shape_string());
  }
  const std::size_t cols = av.cols();
  Tensor out(out_rows, cols);
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || static_cast<std::size_t>(index[k]) >= out_rows) {
      throw ShapeError("scatter_add_rows: target row " + std::to_string(index[k]) + " out of range");
    }
    kernels::active().axpy(cols, 1.0, av.data() + k * cols, out.data() + index[k] * cols);
  }
  return t.record(std::move(out), {a},
                  [a, index = std::move(index), cols](Tape& tp, const Tensor&, const Tensor& g) {
                    double* ga = tp.grad(a).data();
                    const auto& kr = kernels::active();
                    for (std::size_t k = 0; k < index.size(); ++k) {
                      kr.axpy(cols, 1.0, g.data() + index[k] * cols, ga + k * cols);
                    }
                  });
}

}  // namespace moher::ad
