// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernel_tables.hpp"
#include "moher/common.hpp"

namespace moher::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(MOHER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_available() {
#if defined(MOHER_HAVE_AVX2)
  if (cpu_has_avx2()) return &detail::avx2_table();
#endif
#if defined(MOHER_HAVE_NEON)
  return &detail::neon_table();
#endif
  return &scalar_table();
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("MOHER_SIMD"); env != nullptr && *env != '\0') {
    const std::string_view name(env);
    if (name != "auto") {
      const Backend b = parse_backend(name);
      if (available(b)) return &table(b);
    }
  }
  return best_available();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

bool available(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
    case Backend::Neon:
#if defined(MOHER_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (available(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& table(Backend backend) {
  if (!available(backend)) {
    throw InvalidInput("SIMD backend '" + std::string(to_string(backend)) + "' is not available");
  }
  switch (backend) {
#if defined(MOHER_HAVE_AVX2)
    case Backend::Avx2: return detail::avx2_table();
#endif
#if defined(MOHER_HAVE_NEON)
    case Backend::Neon: return detail::neon_table();
#endif
    default: return scalar_table();
  }
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Backend backend) { slot().store(&table(backend), std::memory_order_release); }

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  if (name == "neon") return Backend::Neon;
  throw InvalidInput("unknown SIMD backend '" + std::string(name) + "'");
}

}  // namespace moher::kernels
