// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <bit>
#include <cstring>

#include "moher/rng.hpp"
#include "moher/sampler.hpp"
#include "moher/training.hpp"

namespace moher {

std::vector<std::vector<double>> simulate_new_site(std::span<const double> removed,
                                                   std::span<const double> weights,
                                                   const std::vector<std::vector<double>>& neighbor_flows) {
  if (weights.size() != neighbor_flows.size()) {
    throw ShapeError("simulate_new_site: " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(neighbor_flows.size()) + " neighbors");
  }
  if (neighbor_flows.empty()) throw InvalidInput("simulate_new_site: no geo neighbor to absorb the flow");
  for (double x : removed) {
    if (x < 0.0) throw InvalidInput("simulate_new_site: negative flow");
  }
  std::vector<double> mass(neighbor_flows.size());
  double total = 0.0;
  for (std::size_t j = 0; j < neighbor_flows.size(); ++j) {
    if (neighbor_flows[j].size() != removed.size()) {
      throw ShapeError("simulate_new_site: neighbor flow has the wrong channel count");
    }
    double t = 0.0;
    for (double x : neighbor_flows[j]) {
      if (x < 0.0) throw InvalidInput("simulate_new_site: negative flow");
      t += x;
    }
    mass[j] = weights[j] * t;
    total += mass[j];
  }
  std::vector<std::vector<double>> out = neighbor_flows;
  const double uniform = 1.0 / static_cast<double>(out.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double share = total > 0.0 ? mass[j] / total : uniform;
    for (std::size_t k = 0; k < removed.size(); ++k) out[j][k] += share * removed[k];
  }
  return out;
}

SampleFactory::SampleFactory(const Dataset& data, std::vector<SiteUid> pool, const Normalizer& normalizer,
                             SamplerSettings settings)
    : data_(data), pool_(std::move(pool)), normalizer_(normalizer), settings_(settings) {
  if (settings_.window == 0) throw InvalidInput("sample window must be at least 1");
  if (normalizer_.dim() != data_.feature_dim) {
    throw ShapeError("normalizer has " + std::to_string(normalizer_.dim()) + " channels, data has " +
                     std::to_string(data_.feature_dim));
  }
  std::sort(pool_.begin(), pool_.end());
  for (SiteUid uid : pool_) data_.site(uid);  // validates membership
}

namespace {

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) { return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL)); }

std::uint64_t hash_site(const Site& s) {
  std::uint64_t h = hash_mix(0x6d6f686572ULL, static_cast<std::uint64_t>(s.uid));
  h = hash_mix(h, s.mode);
  h = hash_mix(h, std::bit_cast<std::uint64_t>(s.coord.x_km));
  h = hash_mix(h, std::bit_cast<std::uint64_t>(s.coord.y_km));
  for (double p : s.poi) h = hash_mix(h, std::bit_cast<std::uint64_t>(p));
  return h;
}

}  // namespace

const SampleFactory::SlotView& SampleFactory::slot_view(const Site& target, std::size_t slot) {
  std::vector<const Site*> active;
  std::uint64_t key = hash_site(target);
  for (SiteUid uid : pool_) {
    if (uid == target.uid || !data_.flow(uid).active(slot)) continue;
    active.push_back(&data_.site(uid));
    key = hash_mix(key, static_cast<std::uint64_t>(uid));
  }
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  SlotView view;
  for (const Site* s : active) {
    const double w = encode_geo(target, *s, settings_.edges.gamma_km);
    if (w > 0.0) view.geo_neighbors.emplace_back(s->uid, w);
  }
  LocalizedGraph g = build_localized_graph(target, active, settings_.neighbor_budget, settings_.edges, slot);
  view.graph = std::make_shared<const LocalizedGraph>(std::move(g));
  return cache_.emplace(key, std::move(view)).first->second;
}

std::span<const double> SampleFactory::read_input(SiteUid uid, SiteUid target, std::size_t slot) {
  if (uid == target) {
    ++audit_.target_input_reads;
    throw InvalidInput("target site " + std::to_string(target) + " read as a model input");
  }
  ++audit_.input_reads;
  return data_.flow(uid).at(slot);
}

std::optional<WindowSample> SampleFactory::make(const Site& target, std::size_t end_slot, SampleMode mode,
                                                bool with_label) {
  const std::size_t window = settings_.window;
  if (end_slot + 1 < window) {
    throw RangeError("window of " + std::to_string(window) + " slots ending at " + std::to_string(end_slot) +
                     " starts before the first slot");
  }
  if (end_slot >= data_.slot_count || (with_label && end_slot + 1 >= data_.slot_count)) {
    throw RangeError("slot " + std::to_string(end_slot) + " leaves no room for the requested window");
  }
  const std::size_t dim = data_.feature_dim;

  auto win = std::make_shared<GraphWindow>();
  win->target = target.uid;
  win->end_slot = end_slot;
  WindowSample sample;
  for (std::size_t slot = end_slot + 1 - window; slot <= end_slot; ++slot) {
    const SlotView& view = slot_view(target, slot);
    const LocalizedGraph& g = *view.graph;

    std::vector<std::pair<SiteUid, std::vector<double>>> added;
    if (mode == SampleMode::Training) {
      if (view.geo_neighbors.empty()) return std::nullopt;
      ++audit_.simulation_reads;
      const auto own = data_.flow(target.uid).at(slot);
      std::vector<double> weights;
      std::vector<std::vector<double>> flows;
      for (const auto& [uid, w] : view.geo_neighbors) {
        weights.push_back(w);
        const auto f = data_.flow(uid).at(slot);
        flows.emplace_back(f.begin(), f.end());
      }
      const auto after = simulate_new_site(own, weights, flows);
      for (std::size_t j = 0; j < after.size(); ++j) {
        added.emplace_back(view.geo_neighbors[j].first, after[j]);
      }
    }

    ad::Tensor x(g.nodes.size() - 1, dim);
    for (std::size_t k = 1; k < g.nodes.size(); ++k) {
      const SiteUid uid = g.nodes[k];
      const auto raw = read_input(uid, target.uid, slot);
      auto row = x.row_span(k - 1);
      std::copy(raw.begin(), raw.end(), row.begin());
      for (const auto& [nuid, flow] : added) {
        if (nuid == uid) std::copy(flow.begin(), flow.end(), row.begin());
      }
      normalizer_.apply(row);
    }
    win->slots.push_back(g);
    sample.features.push_back(std::move(x));
  }
  sample.window = std::move(win);
  if (with_label) {
    ++audit_.label_reads;
    const auto y = data_.flow(target.uid).at(end_slot + 1);
    sample.label.assign(y.begin(), y.end());
    normalizer_.apply(sample.label);
  }
  return sample;
}

}  // namespace moher
