// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include "moher/kernels.hpp"

namespace moher::kernels::detail {

#if defined(MOHER_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(MOHER_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace moher::kernels::detail
