// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "moher/sampler.hpp"

namespace moher {

namespace {

struct Candidate {
  double weight;
  const Site* site;
};

void order_candidates(std::vector<Candidate>& batch) {
  std::sort(batch.begin(), batch.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.site->uid < b.site->uid;
  });
}

}  // namespace

LocalizedGraph build_localized_graph(const Site& target, std::span<const Site* const> recorded,
                                     std::size_t neighbor_budget, const EdgeParams& params,
                                     std::size_t slot) {
  for (const Site* s : recorded) {
    if (s->uid == target.uid) {
      throw InvalidInput("build_localized_graph: target " + std::to_string(target.uid) +
                         " appears among the recorded sites");
    }
  }

  LocalizedGraph graph;
  graph.target = target.uid;
  graph.slot = slot;

  std::vector<const Site*> admitted;
  std::unordered_set<SiteUid> seen;  // admitted or queued
  std::deque<const Site*> queue{&target};
  seen.insert(target.uid);

  std::vector<Candidate> batch;
  while (admitted.size() < neighbor_budget + 1 && !queue.empty()) {
    const Site* current = queue.front();
    queue.pop_front();

    for (const Site* earlier : admitted) {
      for (const Edge& e : build_edge(*current, *earlier, params)) graph.edges.push_back(e);
    }
    admitted.push_back(current);
    graph.nodes.push_back(current->uid);
    graph.modes.push_back(current->mode);

    batch.clear();
    for (const Site* s : recorded) {
      if (seen.contains(s->uid)) continue;
      const double w = encode_geo(*current, *s, params.gamma_km);
      if (w > 0.0) batch.push_back({w, s});
    }
    order_candidates(batch);
    for (const Candidate& c : batch) {
      queue.push_back(c.site);
      seen.insert(c.site->uid);
    }

    if (!params.use_poi) continue;
    batch.clear();
    for (const Site* s : recorded) {
      if (seen.contains(s->uid)) continue;
      const double w = encode_poi(*current, *s, params.beta);
      if (w > 0.0) batch.push_back({w, s});
    }
    order_candidates(batch);
    for (const Candidate& c : batch) {
      queue.push_back(c.site);
      seen.insert(c.site->uid);
    }
  }
  return graph;
}

GraphWindow build_graph_window(const Site& target, const Dataset& data,
                               std::span<const SiteUid> pool, std::size_t end_slot,
                               std::size_t window, std::size_t neighbor_budget,
                               const EdgeParams& params) {
  if (window == 0) throw InvalidInput("build_graph_window: window length must be at least 1");
  if (end_slot + 1 < window) {
    throw RangeError("window of " + std::to_string(window) + " slots ending at " +
                     std::to_string(end_slot) + " starts before the first slot");
  }
  if (end_slot >= data.slot_count) {
    throw RangeError("window end slot " + std::to_string(end_slot) + " is past the data (" +
                     std::to_string(data.slot_count) + " slots)");
  }

  GraphWindow out;
  out.target = target.uid;
  out.end_slot = end_slot;
  out.slots.reserve(window);

  std::vector<const Site*> active;
  std::vector<const Site*> previous;
  for (std::size_t slot = end_slot + 1 - window; slot <= end_slot; ++slot) {
    active.clear();
    for (SiteUid uid : pool) {
      if (uid == target.uid) continue;
      if (data.flow(uid).active(slot)) active.push_back(&data.site(uid));
    }
    if (!out.slots.empty() && active == previous) {
      LocalizedGraph copy = out.slots.back();
      copy.slot = slot;
      out.slots.push_back(std::move(copy));
    } else {
      out.slots.push_back(build_localized_graph(target, active, neighbor_budget, params, slot));
    }
    std::swap(previous, active);
  }
  return out;
}

}  // namespace moher
