// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace moher {

/// Sequential generator. Distributions are computed here rather than with
/// <random> distributions so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  std::size_t below(std::size_t n);       // [0, n)

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Counter-based stream: every (seed, stream, counter) triple maps to an
/// independent value, so per-site draws do not depend on evaluation order.
std::uint64_t mix64(std::uint64_t x);
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

}  // namespace moher
