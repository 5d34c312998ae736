// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "moher/graph.hpp"

namespace moher {

/// Breadth-first, weight-ordered localized graph around `target`.
///
/// Candidates are dequeued FIFO. Each admitted node is linked to every node
/// admitted before it, then its geo neighbors (descending weight) and its POI
/// neighbors (descending weight) are appended to the queue unless already
/// admitted or queued. Equal weights are ordered by ascending uid. Growth stops
/// at M+1 nodes or when the queue drains.
LocalizedGraph build_localized_graph(const Site& target, std::span<const Site* const> recorded,
                                     std::size_t neighbor_budget, const EdgeParams& params,
                                     std::size_t slot = 0);

/// One localized graph per slot of the window ending at `end_slot`.
struct GraphWindow {
  SiteUid target = 0;
  std::size_t end_slot = 0;
  std::vector<LocalizedGraph> slots;  // oldest first
};

/// Builds the t'-slot window ending at `end_slot`. At each slot the candidate
/// set is the members of `pool` whose flow series is active at that slot.
/// Consecutive slots with the same active set share one construction.
GraphWindow build_graph_window(const Site& target, const Dataset& data,
                               std::span<const SiteUid> pool, std::size_t end_slot,
                               std::size_t window, std::size_t neighbor_budget,
                               const EdgeParams& params);

}  // namespace moher
