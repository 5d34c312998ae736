// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moher/kernels.hpp"

namespace moher::kernels {
namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Relative agreement up to reassociation and FMA rounding.
void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-12) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], b[i], tol * std::max(1.0, std::abs(b[i]))) << "index " << i;
  }
}

class KernelEquivalence : public ::testing::TestWithParam<Backend> {};

TEST_P(KernelEquivalence, MatchesScalarReference) {
  const KernelTable& ref = scalar_table();
  const KernelTable& k = table(GetParam());
  std::mt19937_64 rng(42);
  // Odd sizes exercise the vector tails.
  for (std::size_t m : {1u, 3u, 7u, 16u}) {
    for (std::size_t kk : {1u, 2u, 5u, 9u}) {
      for (std::size_t n : {1u, 4u, 6u, 13u}) {
        const auto a = random_vec(rng, m * kk);
        const auto b = random_vec(rng, kk * n);
        const auto g = random_vec(rng, m * n);
        auto c0 = random_vec(rng, m * n);
        auto c1 = c0;
        ref.gemm(m, kk, n, a.data(), b.data(), c0.data(), true);
        k.gemm(m, kk, n, a.data(), b.data(), c1.data(), true);
        expect_close(c1, c0);
        ref.gemm(m, kk, n, a.data(), b.data(), c0.data(), false);
        k.gemm(m, kk, n, a.data(), b.data(), c1.data(), false);
        expect_close(c1, c0);

        std::vector<double> t0(kk * n, 0.5), t1(kk * n, 0.5);
        ref.gemm_tn(m, kk, n, a.data(), g.data(), t0.data());
        k.gemm_tn(m, kk, n, a.data(), g.data(), t1.data());
        expect_close(t1, t0);

        std::vector<double> s0(m * kk, -0.25), s1(m * kk, -0.25);
        ref.gemm_nt(m, n, kk, g.data(), b.data(), s0.data());
        k.gemm_nt(m, n, kk, g.data(), b.data(), s1.data());
        expect_close(s1, s0);
      }
    }
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 31u, 100u}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    auto y0 = y, y1 = y;
    ref.axpy(n, 0.7, x.data(), y0.data());
    k.axpy(n, 0.7, x.data(), y1.data());
    expect_close(y1, y0);
    ref.scale(n, -1.3, x.data(), y0.data());
    k.scale(n, -1.3, x.data(), y1.data());
    expect_close(y1, y0);
    ref.mul_acc(n, x.data(), y.data(), y0.data());
    k.mul_acc(n, x.data(), y.data(), y1.data());
    expect_close(y1, y0);
    EXPECT_NEAR(k.dot(n, x.data(), y.data()), ref.dot(n, x.data(), y.data()), 1e-12 * (1.0 + n));

    auto v0 = random_vec(rng, n), m0 = random_vec(rng, n), s0 = random_vec(rng, n);
    for (double& s : s0) s = std::abs(s);
    auto v1 = v0, m1 = m0, s1 = s0;
    AdamCoefficients c;
    c.bias1 = 1.0 - std::pow(0.9, 3);
    c.bias2 = 1.0 - std::pow(0.999, 3);
    ref.adam(n, v0.data(), x.data(), m0.data(), s0.data(), c);
    k.adam(n, v1.data(), x.data(), m1.data(), s1.data(), c);
    expect_close(v1, v0);
    expect_close(m1, m0);
    expect_close(s1, s0);
  }
}

INSTANTIATE_TEST_SUITE_P(Available, KernelEquivalence, ::testing::ValuesIn(available_backends()),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Kernels, ScalarGemmMatchesNaiveTripleLoop) {
  const double a[] = {1, 2, 3, 4, 5, 6};  // 2 x 3
  const double b[] = {7, 8, 9, 10, 11, 12};  // 3 x 2
  double c[4] = {};
  scalar_table().gemm(2, 3, 2, a, b, c, false);
  EXPECT_EQ(c[0], 58.0);
  EXPECT_EQ(c[1], 64.0);
  EXPECT_EQ(c[2], 139.0);
  EXPECT_EQ(c[3], 154.0);
}

TEST(Kernels, ScalarAlwaysAvailableAndNamesRoundTrip) {
  EXPECT_TRUE(available(Backend::Scalar));
  for (Backend b : available_backends()) EXPECT_EQ(parse_backend(to_string(b)), b);
  EXPECT_THROW(parse_backend("sse9"), std::exception);
}

TEST(Kernels, SetActiveSwitchesTable) {
  const Backend before = active().backend;
  set_active(Backend::Scalar);
  EXPECT_EQ(active().backend, Backend::Scalar);
  set_active(before);
  EXPECT_EQ(active().backend, before);
}

}  // namespace
}  // namespace moher::kernels
