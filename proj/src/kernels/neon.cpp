// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <arm_neon.h>

#include <cmath>
#include <cstring>

#include "kernel_tables.hpp"

namespace moher::kernels::detail {

namespace {

inline void row_axpy(std::size_t n, double a, const double* brow, double* crow) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    vst1q_f64(crow + j, vfmaq_f64(vld1q_f64(crow + j), va, vld1q_f64(brow + j)));
  }
  for (; j < n; ++j) crow[j] += a * brow[j];
}

double dot(std::size_t n, const double* x, const double* y) {
  float64x2_t s0 = vdupq_n_f64(0.0);
  float64x2_t s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vfmaq_f64(s0, vld1q_f64(x + i), vld1q_f64(y + i));
    s1 = vfmaq_f64(s1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
          double* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(double) * m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      row_axpy(n, aip, b + p * n, c + i * n);
    }
  }
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* g,
             double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      row_axpy(n, aip, g + i * n, c + p * n);
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* g, const double* b,
             double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) c[i * k + p] += dot(n, g + i * n, b + p * n);
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) { row_axpy(n, alpha, x, y); }

void scale(std::size_t n, double alpha, const double* x, double* y) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_n_f64(vld1q_f64(x + i), alpha));
  for (; i < n; ++i) y[i] = alpha * x[i];
}

void mul_acc(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vfmaq_f64(vld1q_f64(out + i), vld1q_f64(x + i), vld1q_f64(y + i)));
  }
  for (; i < n; ++i) out[i] += x[i] * y[i];
}

void adam(std::size_t n, double* value, const double* grad, double* m, double* v,
          const AdamCoefficients& c) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t mi = vaddq_f64(vmulq_n_f64(vld1q_f64(m + i), c.beta1), vmulq_n_f64(g, 1.0 - c.beta1));
    const float64x2_t vi =
        vaddq_f64(vmulq_n_f64(vld1q_f64(v + i), c.beta2), vmulq_f64(vmulq_n_f64(g, 1.0 - c.beta2), g));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t mhat = vdivq_f64(mi, vdupq_n_f64(c.bias1));
    const float64x2_t vhat = vdivq_f64(vi, vdupq_n_f64(c.bias2));
    const float64x2_t step = vdivq_f64(vmulq_n_f64(mhat, c.lr), vaddq_f64(vsqrtq_f64(vhat), vdupq_n_f64(c.eps)));
    vst1q_f64(value + i, vsubq_f64(vld1q_f64(value + i), step));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    value[i] -= c.lr * (m[i] / c.bias1) / (std::sqrt(v[i] / c.bias2) + c.eps);
  }
}

constexpr KernelTable kNeon{Backend::Neon, "neon", gemm, gemm_tn, gemm_nt, axpy,
                            scale,         mul_acc, dot,  adam};

}  // namespace

const KernelTable& neon_table() { return kNeon; }

}  // namespace moher::kernels::detail
