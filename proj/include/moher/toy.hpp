// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "moher/autodiff.hpp"
#include "moher/model.hpp"

namespace moher {

/// A small random prediction problem: sites scattered in a 2 km square, one
/// localized graph per slot (a random site may drop out at each slot) and
/// standard-normal features and label.
struct ToyInstance {
  std::vector<Site> sites;  // sites[0] is the target
  WindowSample sample;
};

ToyInstance make_toy_instance(std::uint64_t seed, const ModelConfig& config, std::size_t max_nodes,
                              const EdgeParams& edges = {1.0, 0.3, true});

/// Finite-difference check of MSE(forward, label) over every parameter of a
/// freshly initialized model.
ad::GradCheckReport check_model_gradients(const ModelConfig& config, const ToyInstance& toy,
                                          std::uint64_t param_seed, const ad::GradCheckOptions& options = {});

}  // namespace moher
