// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "moher/autodiff.hpp"
#include "moher/graph.hpp"

namespace moher::testing {

using Matrix = std::vector<std::vector<double>>;

inline Matrix to_matrix(const ad::Tensor& t) {
  Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  }
  return m;
}

inline double max_abs_diff(const ad::Tensor& a, const ad::Tensor& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline ad::Tensor random_tensor(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ad::Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

/// Sites with random modes, coordinates in [0, extent]^2 and sparse POI.
inline std::vector<Site> random_sites(std::mt19937_64& rng, std::size_t n, std::size_t modes, double extent,
                                      std::size_t poi_dim = 4) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Site> sites(n);
  for (std::size_t i = 0; i < n; ++i) {
    sites[i].uid = static_cast<SiteUid>(i);
    sites[i].name = "s" + std::to_string(i);
    sites[i].mode = static_cast<ModeId>(rng() % modes);
    sites[i].coord = {u(rng) * extent, u(rng) * extent};
    sites[i].poi.resize(poi_dim);
    for (double& p : sites[i].poi) p = u(rng) < 0.4 ? 0.0 : std::floor(u(rng) * 10.0);
  }
  return sites;
}

/// Dataset over `sites` with every flow series active on all slots.
inline Dataset make_dataset(std::vector<Site> sites, std::size_t modes, std::size_t slots, std::mt19937_64& rng) {
  Dataset d;
  for (std::size_t m = 0; m < modes; ++m) d.modes.push_back({static_cast<ModeId>(m), "m" + std::to_string(m)});
  d.sites = std::move(sites);
  d.slot_count = slots;
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (const Site& s : d.sites) {
    FlowSeries f;
    f.site = s.uid;
    f.values.resize(slots * 2);
    for (double& v : f.values) v = u(rng);
    d.flows.push_back(std::move(f));
  }
  return d;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("moher_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace moher::testing
