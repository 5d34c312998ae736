// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Dense double-precision inner loops used by the autodiff engine, the POI
// encoder and the optimizer. Every routine has a scalar reference version;
// vector variants are selected at runtime and must agree with the reference
// to rounding (FMA contraction and reduction order are the only differences).

namespace moher::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct AdamCoefficients {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double bias1 = 1.0;  // 1 - beta1^t
  double bias2 = 1.0;  // 1 - beta2^t
};

struct KernelTable {
  Backend backend;
  const char* name;

  // C[m x n] (+)= A[m x k] * B[k x n]
  void (*gemm)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
               double* c, bool accumulate);
  // C[k x n] += A[m x k]^T * G[m x n]
  void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* g,
                  double* c);
  // C[m x k] += G[m x n] * B[k x n]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* g, const double* b,
                  double* c);
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  // y = alpha * x
  void (*scale)(std::size_t n, double alpha, const double* x, double* y);
  // out += x * y (elementwise)
  void (*mul_acc)(std::size_t n, const double* x, const double* y, double* out);
  double (*dot)(std::size_t n, const double* x, const double* y);
  void (*adam)(std::size_t n, double* value, const double* grad, double* m, double* v,
               const AdamCoefficients& c);
};

const KernelTable& scalar_table();
bool available(Backend backend);
std::vector<Backend> available_backends();
const KernelTable& table(Backend backend);

/// Table used by the library. Chosen once from the CPU features, or from the
/// MOHER_SIMD environment variable (scalar | avx2 | neon | auto).
const KernelTable& active();
void set_active(Backend backend);

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

}  // namespace moher::kernels
