// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <cmath>

#include "moher/training.hpp"

namespace moher {

Metrics score(std::span<const double> predicted, std::span<const double> actual, double mape_floor) {
  if (predicted.size() != actual.size()) {
    throw ShapeError("score: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(actual.size()) + " labels");
  }
  if (predicted.empty()) throw InvalidInput("score: empty evaluation set");
  double se = 0.0, ape = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    se += d * d;
    ape += std::fabs(d) / std::max(actual[i], mape_floor);
  }
  const double n = static_cast<double>(predicted.size());
  return {std::sqrt(se / n), ape / n, predicted.size()};
}

}  // namespace moher
