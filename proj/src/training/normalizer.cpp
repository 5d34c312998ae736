// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <cmath>

#include "moher/training.hpp"

namespace moher {

Normalizer::Normalizer(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  if (mean_.size() != stddev_.size()) throw InvalidInput("normalizer: mean and stddev lengths differ");
  for (std::size_t k = 0; k < stddev_.size(); ++k) {
    if (!(stddev_[k] > 0.0) || !std::isfinite(stddev_[k]) || !std::isfinite(mean_[k])) {
      throw NumericError("normalizer: channel " + std::to_string(k) + " has invalid statistics");
    }
  }
}

Normalizer Normalizer::fit(std::span<const double> values, std::size_t dim) {
  if (dim == 0 || values.empty() || values.size() % dim != 0) {
    throw InvalidInput("normalizer: need a non-empty set of " + std::to_string(dim) + "-channel rows");
  }
  const std::size_t n = values.size() / dim;
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) mean[k] += values[i * dim + k];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = values[i * dim + k] - mean[k];
      var[k] += d * d;
    }
  }
  std::vector<double> stddev(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    stddev[k] = std::sqrt(var[k] / static_cast<double>(n));
    if (!(stddev[k] > 0.0)) {
      throw NumericError("normalizer: channel " + std::to_string(k) + " has zero variance");
    }
  }
  return Normalizer(std::move(mean), std::move(stddev));
}

Normalizer Normalizer::fit(const Dataset& data, std::span<const SiteUid> sites, SlotRange slots) {
  std::vector<double> values;
  for (SiteUid uid : sites) {
    const FlowSeries& f = data.flow(uid);
    for (std::size_t t = slots.begin; t < slots.end; ++t) {
      if (!f.active(t)) continue;
      const auto row = f.at(t);
      values.insert(values.end(), row.begin(), row.end());
    }
  }
  if (values.empty()) throw DataError("normalizer: no flow records among the fit sites and slots");
  return fit(values, data.feature_dim);
}

void Normalizer::apply(std::span<double> row) const {
  if (row.size() != dim()) throw ShapeError("normalizer: row has " + std::to_string(row.size()) + " channels");
  for (std::size_t k = 0; k < row.size(); ++k) row[k] = (row[k] - mean_[k]) / stddev_[k];
}

void Normalizer::invert(std::span<double> row) const {
  if (row.size() != dim()) throw ShapeError("normalizer: row has " + std::to_string(row.size()) + " channels");
  for (std::size_t k = 0; k < row.size(); ++k) row[k] = row[k] * stddev_[k] + mean_[k];
}

}  // namespace moher
